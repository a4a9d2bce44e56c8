//! Independent oracles and input generators shared by the integration suites.
//!
//! Nothing here calls the library routine it is used to check: matchings and
//! degree-2 subgraphs come from brute force over edge subsets, determinants
//! from Gaussian elimination over `ℚ(i)`.
#![allow(dead_code)]

use flatband_core::graph::{GaussianMatrix, Multigraph, SchrodingerWeights, VertexSet};
use flatband_core::number::{ratio, GaussianRational, Rational};
use flatband_core::poly::{poly_gcd, RationalPolynomial};
use flatband_core::rng::Rng;
use num::{One, Zero};
use proptest::prelude::*;

/// Vertex degrees contributed by the given edges; a loop adds 2.
pub fn degrees_of(g: &Multigraph, ids: &[usize]) -> Vec<usize> {
    let mut deg = vec![0; g.vertex_count()];
    for &e in ids {
        let edge = g.edge(e);
        deg[edge.u] += 1;
        deg[edge.v] += 1;
    }
    deg
}

pub fn is_degree2(g: &Multigraph, ids: &[usize]) -> bool {
    degrees_of(g, ids).iter().all(|&d| d == 0 || d == 2)
}

pub fn covered_by(g: &Multigraph, ids: &[usize]) -> VertexSet {
    VertexSet::from_iter(
        degrees_of(g, ids)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(v, _)| v),
    )
}

fn subsets(m: usize) -> impl Iterator<Item = Vec<usize>> {
    assert!(m <= 20, "brute force over 2^{m} edge subsets");
    (0u32..1 << m).map(move |mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect())
}

/// Every degree-2 edge set, each sorted, in mask order (empty first).
pub fn brute_degree2_sets(g: &Multigraph) -> Vec<Vec<usize>> {
    subsets(g.edge_count())
        .filter(|ids| is_degree2(g, ids))
        .collect()
}

/// Signed sum over matchings, straight from the definition.
pub fn brute_matching_poly(
    g: &Multigraph,
    w: &SchrodingerWeights,
    s: VertexSet,
) -> RationalPolynomial {
    let inside: Vec<usize> = (0..g.edge_count())
        .filter(|&e| {
            let edge = g.edge(e);
            !edge.is_loop() && s.contains(edge.u) && s.contains(edge.v)
        })
        .collect();
    let mut total = RationalPolynomial::zero();
    for pick in subsets(inside.len()) {
        let ids: Vec<usize> = pick.iter().map(|&i| inside[i]).collect();
        if degrees_of(g, &ids).iter().any(|&d| d > 1) {
            continue;
        }
        let covered = covered_by(g, &ids);
        let sign = if ids.len().is_multiple_of(2) { 1 } else { -1 };
        let mut term = RationalPolynomial::constant(
            ids.iter()
                .map(|&e| w.weight(e).norm_sqr())
                .fold(Rational::from_integer(sign.into()), |a, b| a * b),
        );
        for v in s.iter().filter(|&v| !covered.contains(v)) {
            let factor = RationalPolynomial::new(vec![-w.potential(v).clone(), Rational::one()]);
            term = &term * &factor;
        }
        total = &total + &term;
    }
    total
}

/// Gcd of `m_{G∖γ}` over brute-force degree-2 sets, made monic (1 if constant).
pub fn brute_flat_gcd(g: &Multigraph, w: &SchrodingerWeights) -> RationalPolynomial {
    let mut acc = RationalPolynomial::zero();
    for ids in brute_degree2_sets(g) {
        let rest = g.vertices().difference(covered_by(g, &ids));
        acc = poly_gcd(&acc, &brute_matching_poly(g, w, rest));
        if acc.is_constant() {
            return RationalPolynomial::one();
        }
    }
    acc.monic()
}

/// Determinant by Gaussian elimination with pivot search.
pub fn det(mut m: GaussianMatrix) -> GaussianRational {
    let n = m.len();
    let mut result = GaussianRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return GaussianRational::zero();
        };
        if p != col {
            m.swap(p, col);
            result = -result;
        }
        let pivot = m[col][col].clone();
        let inv = pivot.inv().unwrap();
        result = &result * &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &inv;
            let (top, bottom) = m.split_at_mut(r);
            for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = &*x - &(&f * y);
            }
        }
    }
    result
}

/// `det(λI − h)`.
pub fn char_det_at(h: &GaussianMatrix, lambda: &GaussianRational) -> GaussianRational {
    let mut m = h.clone();
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = -x.clone();
            if i == j {
                *x = &*x + lambda;
            }
        }
    }
    det(m)
}

/// Cycle detection by union-find on the edges of `g[s]`.
pub fn is_forest(g: &Multigraph, s: VertexSet) -> bool {
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in g.edges() {
        if !(s.contains(e.u) && s.contains(e.v)) {
            continue;
        }
        let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Neighbours of `s` outside `s`.
pub fn boundary_oracle(g: &Multigraph, s: VertexSet) -> VertexSet {
    let mut out = VertexSet::EMPTY;
    for e in g.edges() {
        if s.contains(e.u) && !s.contains(e.v) {
            out = out.with(e.v);
        }
        if s.contains(e.v) && !s.contains(e.u) {
            out = out.with(e.u);
        }
    }
    out
}

fn small_rational(rng: &mut Rng, lo: i64, hi: i64) -> Rational {
    let p = lo + rng.index((hi - lo + 1) as usize) as i64;
    let q = 1 + rng.index(3) as i64;
    ratio(p, q)
}

/// Nonzero Gaussian-rational edge weights and rational potentials.
pub fn random_weights(g: &Multigraph, rng: &mut Rng, complex: bool) -> SchrodingerWeights {
    let weights = (0..g.edge_count())
        .map(|_| loop {
            let re = small_rational(rng, -3, 3);
            let im = if complex {
                small_rational(rng, -3, 3)
            } else {
                Rational::zero()
            };
            let w = GaussianRational::new(re, im);
            if !w.is_zero() {
                break w;
            }
        })
        .collect();
    let potentials = (0..g.vertex_count())
        .map(|_| small_rational(rng, -2, 2))
        .collect();
    SchrodingerWeights::new(weights, potentials).unwrap()
}

/// Uniform endpoints (loops and repeats allowed), not necessarily connected.
pub fn random_edges(n: usize, m: usize, rng: &mut Rng) -> Multigraph {
    let edges: Vec<_> = (0..m).map(|_| (rng.index(n), rng.index(n))).collect();
    Multigraph::from_edges(n, &edges)
}

pub fn arb_multigraph(max_n: usize, max_e: usize) -> impl Strategy<Value = Multigraph> {
    (1..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec((0..n, 0..n), 0..=max_e)
            .prop_map(move |edges| Multigraph::from_edges(n, &edges))
    })
}

pub fn arb_connected_multigraph(
    max_n: usize,
    max_extra: usize,
) -> impl Strategy<Value = Multigraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let tree = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n), 0..=max_extra);
        (tree, extra).prop_map(move |(tree, extra)| {
            let mut edges: Vec<_> = tree
                .iter()
                .enumerate()
                .map(|(i, ix)| (ix.index(i + 1), i + 1))
                .collect();
            edges.extend(extra);
            Multigraph::from_edges(n, &edges)
        })
    })
}

fn arb_small_rational() -> impl Strategy<Value = Rational> {
    (-3i64..=3, 1i64..=3).prop_map(|(p, q)| ratio(p, q))
}

pub fn arb_weights(g: &Multigraph, complex: bool) -> impl Strategy<Value = SchrodingerWeights> {
    let part = move || {
        if complex {
            arb_small_rational().boxed()
        } else {
            Just(Rational::zero()).boxed()
        }
    };
    let edge = (arb_small_rational(), part())
        .prop_map(|(re, im)| GaussianRational::new(re, im))
        .prop_filter("nonzero weight", |w| !w.is_zero());
    (
        proptest::collection::vec(edge, g.edge_count()),
        proptest::collection::vec(arb_small_rational(), g.vertex_count()),
    )
        .prop_map(|(w, v)| SchrodingerWeights::new(w, v).unwrap())
}

/// A weighted graph together with its weights.
pub fn arb_weighted(
    max_n: usize,
    max_e: usize,
    complex: bool,
) -> impl Strategy<Value = (Multigraph, SchrodingerWeights)> {
    arb_multigraph(max_n, max_e).prop_flat_map(move |g| {
        let w = arb_weights(&g, complex);
        (Just(g), w)
    })
}

pub fn arb_connected_weighted(
    max_n: usize,
    max_extra: usize,
    complex: bool,
) -> impl Strategy<Value = (Multigraph, SchrodingerWeights)> {
    arb_connected_multigraph(max_n, max_extra).prop_flat_map(move |g| {
        let w = arb_weights(&g, complex);
        (Just(g), w)
    })
}
