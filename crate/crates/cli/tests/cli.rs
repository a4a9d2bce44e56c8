use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn flatband(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatband"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

/// Generates a named fixture through `gen` and returns its graph file.
fn fixture(dir: &Path, name: &str) -> PathBuf {
    let spec = write(
        dir,
        &format!("{name}.spec.json"),
        &format!(r#"{{"kind":{{"type":"named","name":"{name}"}},"seed":0,"count":1}}"#),
    );
    let out = dir.join(name);
    let run = flatband(&[
        "gen",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    out.join("graph_0000.json")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn flatbands_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let lieb = fixture(dir.path(), "lieb");
    let out = flatband(&["flatbands", s(&lieb)]);
    assert_eq!(out.status.code(), Some(10));
    let report = json(&out);
    assert_eq!(report["gcd"], "x");
    assert_eq!(report["rational_roots"][0]["value"], "0");

    let theta = fixture(dir.path(), "theta");
    let out = flatband(&["flatbands", s(&theta)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["gcd"], "1");
}

#[test]
fn verify_identities() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = fixture(dir.path(), "k4");
    for identity in [
        "recursion",
        "charpoly",
        "moebius",
        "prop_a2",
        "heilmann_lieb",
    ] {
        let out = flatband(&["verify", s(&k4), "--identity", identity]);
        assert_eq!(out.status.code(), Some(0), "{identity}");
        assert_eq!(json(&out)["pass"], true, "{identity}");
    }
    let lieb = fixture(dir.path(), "lieb");
    let out = flatband(&["verify", s(&lieb), "--identity", "heilmann_lieb"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "precondition");
}

#[test]
fn input_errors_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"vertices":[{"id":0,"potential":"1/0"}],"edges":[]}"#,
            "malformed_rational",
        ),
        (
            r#"{"vertices":[{"id":0},{"id":1}],"edges":[{"id":0,"u":0,"v":1,"w_re":"1"},{"id":1,"u":0,"v":1}]}"#,
            "missing_weight",
        ),
        (
            r#"{"vertices":[{"id":0},{"id":1}],"edges":[]}"#,
            "disconnected_input",
        ),
        ("not json", "malformed_json"),
    ];
    for (i, (body, kind)) in cases.iter().enumerate() {
        let path = write(dir.path(), &format!("bad{i}.json"), body);
        let out = flatband(&["flatbands", s(&path)]);
        assert_eq!(out.status.code(), Some(2), "{kind}");
        assert_eq!(json(&out)["error"]["kind"], *kind);
    }
    let out = flatband(&["flatbands", s(&dir.path().join("absent.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "io");

    let lieb = fixture(dir.path(), "lieb");
    let out = flatband(&["bgvm", s(&lieb), "--lambda", "2/0"]);
    assert_eq!(json(&out)["error"]["kind"], "malformed_rational");
}

#[test]
fn other_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let lieb = fixture(dir.path(), "lieb");

    let out = flatband(&["matchpoly", s(&lieb)]);
    assert_eq!(json(&out)["poly"], "x^3 - 4*x");
    let out = flatband(&["matchpoly", s(&lieb), "--delete", "1,2"]);
    assert_eq!(json(&out)["poly"], "x");

    let out = flatband(&["deg2", s(&lieb), "--count"]);
    assert_eq!(json(&out)["count"], 3);
    let out = flatband(&["deg2", s(&lieb), "--list"]);
    assert_eq!(json(&out)["subgraphs"].as_array().unwrap().len(), 3);

    let out = flatband(&["decompose", s(&lieb)]);
    assert_eq!(json(&out)["bridges"].as_array().unwrap().len(), 0);

    let out = flatband(&["bgvm", s(&lieb), "--lambda", "0"]);
    assert_eq!(json(&out)["result"], "found");
    let out = flatband(&["bgvm", s(&lieb), "--all", "--max-size", "2"]);
    assert!(!json(&out)["candidates"].as_array().unwrap().is_empty());

    let out = flatband(&["compare", s(&lieb)]);
    assert_eq!(json(&out)["verdict"], "agree");

    let out = flatband(&[
        "--threads",
        "2",
        "floquet",
        s(&lieb),
        "--samples",
        "3",
        "--seed",
        "9",
        "--check-lambda",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[0],
        "sample,theta_0,theta_1,theta_2,theta_3,eig_0,eig_1,eig_2,min_distance"
    );
    for line in &lines[1..] {
        let d: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(d <= 1e-9);
    }
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"kind":{"type":"random_regular","n":6,"d":3,"allow_loops":true,"allow_multi":true},"seed":42,"count":4}"#,
    );
    let mut runs = Vec::new();
    for out in ["a", "b"] {
        let out = dir.path().join(out);
        let run = flatband(&["gen", "--spec", s(&spec), "--out", s(&out)]);
        assert_eq!(run.status.code(), Some(0));
        let manifest: Value =
            serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["spec"]["seed"], 42);
        let files: Vec<String> = manifest["files"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| fs::read_to_string(out.join(f.as_str().unwrap())).unwrap())
            .collect();
        assert_eq!(files.len(), 4);
        runs.push(files);
    }
    assert_eq!(runs[0], runs[1]);

    let graph = dir.path().join("a").join("graph_0000.json");
    let first = flatband(&["flatbands", s(&graph)]);
    let second = flatband(&["flatbands", s(&graph)]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.status.code(), Some(0));
}
