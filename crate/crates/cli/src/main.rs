//! `flatband`: batch front end for flatband-core.
//!
//! Every report goes to stdout in one write. Exit codes: 0 for a clean result,
//! 10 when flat bands are present or a check fails, 2 for input errors (with an
//! `{"error": {"kind", "message"}}` body).

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use flatband_core::bgvm::{
    bgvm_candidate_lambdas, bgvm_holds, compare_ab_vs_uni, prop_a2_violations, BgvmSearch,
    DEFAULT_COMPARE_MAX_VERTICES,
};
use flatband_core::combinatorics::{
    enumerate_degree2_subgraphs, matching_poly_on, verify_recursion_identity, Degree2Subgraph,
};
use flatband_core::decomposition::bridge_block_decomposition;
use flatband_core::flatband::{
    charpoly_expansion_sides, flatband_polynomial, heilmann_lieb_check, moebius_identity_sides,
};
use flatband_core::floquet::{floquet_samples, min_distance};
use flatband_core::generators::{generate_corpus, CorpusSpec};
use flatband_core::graph::{Multigraph, SchrodingerWeights, VertexSet};
use flatband_core::io::{graph_from_json, graph_to_json, to_canonical_string};
use flatband_core::number::{format_rational, parse_rational, rational_to_f64};
use flatband_core::Error;

const EXIT_FOUND: u8 = 10;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "flatband",
    version,
    about = "Exact flat-band analysis of multigraphs"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gcd of matching polynomials over degree-2 subgraphs; exit 10 if nonconstant.
    Flatbands { graph: PathBuf },
    /// Matching polynomial, optionally with vertices deleted.
    Matchpoly {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        delete: Vec<usize>,
    },
    /// Degree-2 subgraphs (including the empty one).
    Deg2 {
        graph: PathBuf,
        #[arg(long, conflicts_with = "list")]
        count: bool,
        #[arg(long)]
        list: bool,
    },
    /// Bridges and the bridge-block forest.
    Decompose { graph: PathBuf },
    /// Floquet spectra at seeded torus points, as CSV.
    Floquet {
        graph: PathBuf,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Adds a column with the distance from this value to each spectrum.
        #[arg(long, value_name = "P/Q")]
        check_lambda: Option<String>,
    },
    /// Aomoto-set certificates for the universal cover.
    #[command(group(ArgGroup::new("target").required(true).args(["lambda", "all"])))]
    Bgvm {
        graph: PathBuf,
        #[arg(long, value_name = "P/Q")]
        lambda: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Exact identity checks; exit 10 on failure.
    Verify {
        graph: PathBuf,
        #[arg(long, value_enum)]
        identity: Identity,
    },
    /// Writes a corpus described by a JSON spec.
    Gen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Abelian-cover flat bands against universal-cover eigenvalues.
    Compare {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_COMPARE_MAX_VERTICES)]
        max_vertices: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    Recursion,
    Charpoly,
    Moebius,
    #[value(name = "prop_a2")]
    PropA2,
    #[value(name = "heilmann_lieb")]
    HeilmannLieb,
}

impl Identity {
    fn name(self) -> &'static str {
        match self {
            Identity::Recursion => "recursion",
            Identity::Charpoly => "charpoly",
            Identity::Moebius => "moebius",
            Identity::PropA2 => "prop_a2",
            Identity::HeilmannLieb => "heilmann_lieb",
        }
    }
}

enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn to_value(&self) -> Value {
        let (kind, message) = match self {
            CliError::Core(e) => (e.kind(), e.to_string()),
            CliError::Io(path, e) => ("io", format!("{}: {e}", path.display())),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

struct Report {
    body: String,
    code: u8,
}

impl Report {
    fn json(v: &Value, code: u8) -> Self {
        Report {
            body: to_canonical_string(v),
            code,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn load(path: &Path) -> Result<(Multigraph, SchrodingerWeights), CliError> {
    Ok(graph_from_json(&read(path)?)?)
}

fn deg2_value(g: &Multigraph, list: bool) -> Value {
    let all = enumerate_degree2_subgraphs(g);
    if list {
        json!({
            "count": all.len(),
            "subgraphs": all.iter().map(Degree2Subgraph::to_value).collect::<Vec<_>>(),
        })
    } else {
        json!({ "count": all.len() })
    }
}

fn floquet_csv(
    g: &Multigraph,
    w: &SchrodingerWeights,
    samples: usize,
    seed: u64,
    check: Option<&str>,
) -> Result<String, CliError> {
    let lambda = check.map(parse_rational).transpose()?;
    let data = floquet_samples(g, w, samples, seed)?;
    let mut out = String::from("sample");
    for e in 0..g.edge_count() {
        write!(out, ",theta_{e}").unwrap();
    }
    for k in 0..g.vertex_count() {
        write!(out, ",eig_{k}").unwrap();
    }
    if lambda.is_some() {
        out.push_str(",min_distance");
    }
    out.push('\n');
    for (i, s) in data.iter().enumerate() {
        write!(out, "{i}").unwrap();
        for t in s.thetas.iter().chain(&s.eigenvalues) {
            write!(out, ",{t:.17e}").unwrap();
        }
        if let Some(l) = &lambda {
            let d = min_distance(&s.eigenvalues, rational_to_f64(l));
            write!(out, ",{d:.17e}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn bgvm_value(
    g: &Multigraph,
    w: &SchrodingerWeights,
    lambda: Option<&str>,
    cap: Option<usize>,
) -> Result<Value, CliError> {
    if let Some(text) = lambda {
        let l = parse_rational(text)?;
        let (result, certificate) = match bgvm_holds(g, w, &l, cap)? {
            BgvmSearch::Found(c) => ("found", c.to_value()),
            BgvmSearch::NoneExists => ("none_exists", Value::Null),
            BgvmSearch::NoneWithinCap { .. } => ("none_within_cap", Value::Null),
        };
        return Ok(json!({
            "lambda": format_rational(&l),
            "result": result,
            "certificate": certificate,
            "max_size": cap,
        }));
    }
    let found = bgvm_candidate_lambdas(g, w, cap)?;
    Ok(json!({
        "candidates": found.found.iter().map(|(p, c)| json!({
            "poly": p.to_text(),
            "certificate": c.to_value(),
        })).collect::<Vec<_>>(),
        "complete": found.complete,
        "max_size": cap,
    }))
}

fn verify(g: &Multigraph, w: &SchrodingerWeights, identity: Identity) -> Result<Report, CliError> {
    let mut v = json!({ "identity": identity.name() });
    let pass = match identity {
        Identity::Recursion => verify_recursion_identity(g, w),
        Identity::Charpoly | Identity::Moebius => {
            let (lhs, rhs) = if matches!(identity, Identity::Charpoly) {
                charpoly_expansion_sides(g, w)?
            } else {
                moebius_identity_sides(g, w)?
            };
            v["lhs"] = json!(lhs.to_text());
            v["rhs"] = json!(rhs.to_text());
            lhs == rhs
        }
        Identity::PropA2 => {
            let bad = prop_a2_violations(g, w)?;
            v["violations"] = bad.iter().map(|c| c.to_value()).collect();
            bad.is_empty()
        }
        Identity::HeilmannLieb => heilmann_lieb_check(g)?,
    };
    v["pass"] = json!(pass);
    Ok(Report::json(&v, if pass { 0 } else { EXIT_FOUND }))
}

fn generate(spec_path: &Path, out: &Path) -> Result<Report, CliError> {
    let spec: CorpusSpec = serde_json::from_str(&read(spec_path)?).map_err(Error::from)?;
    let corpus = generate_corpus(&spec)?;
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |e| CliError::Io(p, e)
    };
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut files = Vec::with_capacity(corpus.len());
    for (i, (g, w)) in corpus.iter().enumerate() {
        let name = format!("graph_{i:04}.json");
        let path = out.join(&name);
        fs::write(&path, graph_to_json(g, w)).map_err(io_err(&path))?;
        files.push(name);
    }
    let manifest = json!({
        "spec": serde_json::to_value(&spec).map_err(Error::from)?,
        "files": files,
    });
    let path = out.join("manifest.json");
    fs::write(&path, to_canonical_string(&manifest)).map_err(io_err(&path))?;
    Ok(Report::json(&manifest, 0))
}

fn run(cmd: Command) -> Result<Report, CliError> {
    Ok(match cmd {
        Command::Flatbands { graph } => {
            let (g, w) = load(&graph)?;
            let report = flatband_polynomial(&g, &w)?;
            let code = if report.has_flat_bands() {
                EXIT_FOUND
            } else {
                0
            };
            Report::json(&report.to_value(), code)
        }
        Command::Matchpoly { graph, delete } => {
            let (g, w) = load(&graph)?;
            if let Some(&bad) = delete.iter().find(|&&v| v >= g.vertex_count()) {
                return Err(Error::InvalidGraph(format!("no vertex {bad} to delete")).into());
            }
            let removed = VertexSet::from_iter(delete);
            w.check_covers(&g)?;
            let p = matching_poly_on(&g, &w, g.vertices().difference(removed));
            let mut v = p.to_value();
            v["poly"] = json!(p.to_text());
            v["deleted"] = json!(removed.to_vec());
            Report::json(&v, 0)
        }
        Command::Deg2 { graph, list, .. } => {
            let (g, _) = load(&graph)?;
            Report::json(&deg2_value(&g, list), 0)
        }
        Command::Decompose { graph } => {
            let (g, _) = load(&graph)?;
            Report::json(&bridge_block_decomposition(&g).to_value(), 0)
        }
        Command::Floquet {
            graph,
            samples,
            seed,
            check_lambda,
        } => {
            let (g, w) = load(&graph)?;
            Report {
                body: floquet_csv(&g, &w, samples, seed, check_lambda.as_deref())?,
                code: 0,
            }
        }
        Command::Bgvm {
            graph,
            lambda,
            max_size,
            ..
        } => {
            let (g, w) = load(&graph)?;
            Report::json(&bgvm_value(&g, &w, lambda.as_deref(), max_size)?, 0)
        }
        Command::Verify { graph, identity } => {
            let (g, w) = load(&graph)?;
            verify(&g, &w, identity)?
        }
        Command::Gen { spec, out } => generate(&spec, &out)?,
        Command::Compare {
            graph,
            max_vertices,
        } => {
            let (g, w) = load(&graph)?;
            Report::json(&compare_ab_vs_uni(&g, &w, max_vertices)?.to_value(), 0)
        }
    })
}

fn main() -> ExitCode {
    let mut command = <Cli as clap::CommandFactory>::command();
    if std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty()) {
        command = command.color(clap::ColorChoice::Never);
    }
    let cli = match <Cli as clap::FromArgMatches>::from_arg_matches(&command.get_matches()) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
        {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let (body, code) = match run(cli.command) {
        Ok(r) => (r.body, r.code),
        Err(e) => (to_canonical_string(&e.to_value()), EXIT_INPUT),
    };
    let mut stdout = std::io::stdout().lock();
    if stdout
        .write_all(body.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::from(code)
}
