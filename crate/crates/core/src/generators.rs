//! Named fixtures and seeded random multigraphs.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, SchrodingerWeights};
use crate::rng::Rng;

/// Attempts made by the configuration model before giving up.
pub const DEFAULT_RETRY_BUDGET: usize = 10_000;

/// Largest `n` accepted by [`exhaustive_simple`].
pub const EXHAUSTIVE_MAX_VERTICES: usize = 6;

pub const FIXTURE_NAMES: &[&str] = &[
    "zd_bouquet(k)",
    "theta",
    "lieb",
    "petersen",
    "k4",
    "k33",
    "c_n(n)",
    "k1_3",
    "house_like",
];

fn parenthesized(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?
        .strip_prefix('(')?
        .strip_suffix(')')?
        .trim()
        .parse()
        .ok()
}

/// One fixture graph with adjacency weights.
///
/// `lieb` has vertices `a = 0`, `b = 1`, `c = 2` with doubled edges `a–b` and
/// `a–c`. `house_like` is a square `0-1-2-3` with a doubled `0–1` side and a
/// roof vertex `4` on `2` and `3`: bridgeless, max degree 3, and only the roof
/// falls short of it.
pub fn named_fixture(name: &str) -> Result<(Multigraph, SchrodingerWeights)> {
    let unknown = || Error::UnknownFixture(name.to_string());
    let g = match name {
        "theta" => Multigraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]),
        "lieb" => Multigraph::from_edges(3, &[(0, 1), (0, 1), (0, 2), (0, 2)]),
        "petersen" => petersen(),
        "k4" => complete(4),
        "k33" => Multigraph::from_edges(
            6,
            &[
                (0, 3),
                (0, 4),
                (0, 5),
                (1, 3),
                (1, 4),
                (1, 5),
                (2, 3),
                (2, 4),
                (2, 5),
            ],
        ),
        "k1_3" => Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]),
        "house_like" => {
            Multigraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (2, 4), (3, 4)])
        }
        _ => {
            if let Some(k) = parenthesized(name, "zd_bouquet") {
                Multigraph::from_edges(1, &vec![(0, 0); k])
            } else if let Some(n) = parenthesized(name, "c_n") {
                if n == 0 {
                    return Err(unknown());
                }
                cycle(n)
            } else {
                return Err(unknown());
            }
        }
    };
    let w = SchrodingerWeights::adjacency(&g);
    Ok((g, w))
}

/// Cycle on `n` vertices; `n = 1` is a loop and `n = 2` a digon.
pub fn cycle(n: usize) -> Multigraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Multigraph::from_edges(n, &edges)
}

pub fn complete(n: usize) -> Multigraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Multigraph::from_edges(n, &edges)
}

pub fn petersen() -> Multigraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, (i + 2) % 5 + 5));
    }
    Multigraph::from_edges(10, &edges)
}

/// Pairs shuffled half-edges until the constraints hold.
pub fn configuration_model(
    degrees: &[usize],
    rng: &mut Rng,
    allow_loops: bool,
    allow_multi: bool,
    require_connected: bool,
    budget: usize,
) -> Result<Multigraph> {
    let n = degrees.len();
    if n == 0 {
        return Err(Error::Precondition("degree sequence is empty".into()));
    }
    let mut stubs: Vec<usize> = Vec::new();
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v, d));
    }
    if !stubs.len().is_multiple_of(2) {
        return Err(Error::Precondition("degree sum is odd".into()));
    }

    'attempt: for _ in 0..budget {
        rng.shuffle(&mut stubs);
        let mut seen = HashSet::new();
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if !allow_loops && u == v {
                continue 'attempt;
            }
            if !allow_multi && !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        let g = Multigraph::new(n, &edges)?;
        if require_connected && !g.is_connected() {
            continue;
        }
        return Ok(g);
    }
    Err(Error::GeneratorExhausted(format!(
        "no pairing met the constraints in {budget} attempts"
    )))
}

pub fn random_regular_with(
    n: usize,
    d: usize,
    rng: &mut Rng,
    allow_loops: bool,
    allow_multi: bool,
) -> Result<Multigraph> {
    if n == 0 || !(n * d).is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "no {d}-regular graph on {n} vertices"
        )));
    }
    configuration_model(
        &vec![d; n],
        rng,
        allow_loops,
        allow_multi,
        true,
        DEFAULT_RETRY_BUDGET,
    )
}

/// Connected `d`-regular multigraph from the configuration model.
pub fn random_regular_multigraph(
    n: usize,
    d: usize,
    seed: u64,
    allow_loops: bool,
    allow_multi: bool,
) -> Result<Multigraph> {
    random_regular_with(n, d, &mut Rng::new(seed), allow_loops, allow_multi)
}

/// Connected multigraph with `n` vertices and `m` edges: a random recursive
/// tree plus uniformly placed extra edges (loops and repeats allowed), with
/// vertex labels and edge order shuffled.
pub fn random_multigraph_with(n: usize, m: usize, rng: &mut Rng) -> Result<Multigraph> {
    if n == 0 || m + 1 < n {
        return Err(Error::Precondition(format!(
            "{m} edges cannot connect {n} vertices"
        )));
    }
    let mut label: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut label);
    let mut edges = Vec::with_capacity(m);
    for v in 1..n {
        edges.push((label[rng.index(v)], label[v]));
    }
    while edges.len() < m {
        edges.push((rng.index(n), rng.index(n)));
    }
    rng.shuffle(&mut edges);
    Multigraph::new(n, &edges)
}

pub fn random_multigraph(n: usize, m: usize, seed: u64) -> Result<Multigraph> {
    random_multigraph_with(n, m, &mut Rng::new(seed))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of connected simple graphs on
/// `n` vertices, ordered by the canonical edge bitmask (1, 1, 2, 6, 21, 112
/// graphs for n = 1..6).
pub fn exhaustive_simple(n: usize) -> Result<Vec<Multigraph>> {
    if n == 0 || n > EXHAUSTIVE_MAX_VERTICES {
        return Err(Error::Precondition(format!(
            "exhaustive enumeration supports 1..={EXHAUSTIVE_MAX_VERTICES} vertices"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let index = |u: usize, v: usize| {
        let (a, b) = (u.min(v), u.max(v));
        pairs.iter().position(|&p| p == (a, b)).unwrap()
    };
    let relabel: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| index(p[u], p[v])).collect())
        .collect();

    let mut found = HashSet::new();
    for mask in 0u32..1 << pairs.len() {
        let edges: Vec<_> = (0..pairs.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| pairs[i])
            .collect();
        if edges.len() + 1 < n || !Multigraph::from_edges(n, &edges).is_connected() {
            continue;
        }
        let canonical = relabel
            .iter()
            .map(|r| {
                (0..pairs.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .fold(0u32, |acc, i| acc | 1 << r[i])
            })
            .min()
            .unwrap();
        found.insert(canonical);
    }
    let mut masks: Vec<u32> = found.into_iter().collect();
    masks.sort_unstable();
    Ok(masks
        .into_iter()
        .map(|mask| {
            let edges: Vec<_> = (0..pairs.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            Multigraph::from_edges(n, &edges)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorpusKind {
    Named {
        name: String,
    },
    RandomRegular {
        n: usize,
        d: usize,
        allow_loops: bool,
        allow_multi: bool,
    },
    RandomMultigraph {
        n: usize,
        m: usize,
    },
    ExhaustiveSimple {
        n: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub kind: CorpusKind,
    pub seed: u64,
    /// Graphs to draw; for `named` and `exhaustive_simple`, an upper bound.
    pub count: usize,
}

/// Random kinds draw every graph from one stream seeded by `spec.seed`.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<(Multigraph, SchrodingerWeights)>> {
    let adjacency = |g: Multigraph| {
        let w = SchrodingerWeights::adjacency(&g);
        (g, w)
    };
    let mut rng = Rng::new(spec.seed);
    match &spec.kind {
        CorpusKind::Named { name } => {
            let fixture = named_fixture(name)?;
            Ok(std::iter::once(fixture).take(spec.count).collect())
        }
        CorpusKind::RandomRegular {
            n,
            d,
            allow_loops,
            allow_multi,
        } => (0..spec.count)
            .map(|_| {
                random_regular_with(*n, *d, &mut rng, *allow_loops, *allow_multi).map(adjacency)
            })
            .collect(),
        CorpusKind::RandomMultigraph { n, m } => (0..spec.count)
            .map(|_| random_multigraph_with(*n, *m, &mut rng).map(adjacency))
            .collect(),
        CorpusKind::ExhaustiveSimple { n } => Ok(exhaustive_simple(*n)?
            .into_iter()
            .take(spec.count)
            .map(adjacency)
            .collect()),
    }
}
