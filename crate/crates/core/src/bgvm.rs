//! Eigenvalues of the universal-cover operator via Aomoto sets.
//!
//! `λ` is an eigenvalue of the lift to the universal cover iff some `S ⊆ V`
//! has `G[S]` a forest, `λ` an eigenvalue of `ℋ` restricted to each tree of
//! `G[S]`, and fewer boundary vertices than trees. Self-loops and parallel
//! edges are cycles, so they disqualify `S`.

use std::collections::HashMap;

use num::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flatband::{flatband_polynomial, is_flatband};
use crate::graph::{hamiltonian_on, Multigraph, SchrodingerWeights, VertexSet};
use crate::number::Rational;
use crate::poly::{
    char_poly, poly_gcd, squarefree_part, sturm_isolate, RationalPolynomial, RootIsolation,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AomotoCertificate {
    pub s: VertexSet,
    /// Trees of `G[S]`, ordered by smallest vertex.
    pub components: Vec<VertexSet>,
    pub boundary: VertexSet,
    /// Gcd of the trees' characteristic polynomials.
    pub lambda_poly: RationalPolynomial,
}

impl AomotoCertificate {
    pub fn to_value(&self) -> Value {
        json!({
            "s": self.s.to_vec(),
            "components": self.components.iter().map(|c| c.to_vec()).collect::<Vec<_>>(),
            "boundary": self.boundary.to_vec(),
            "lambda_poly": self.lambda_poly.to_text(),
            "lambda_poly_coeffs": self.lambda_poly.to_value()["coeffs"],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BgvmSearch {
    Found(AomotoCertificate),
    NoneExists,
    /// Sets larger than `cap` were not examined.
    NoneWithinCap {
        cap: usize,
    },
}

/// `∂S`: vertices outside `S` adjacent to `S`.
pub fn boundary(g: &Multigraph, s: VertexSet) -> VertexSet {
    s.iter()
        .fold(VertexSet::EMPTY, |acc, v| {
            acc.union(g.neighbors_within(v, g.vertices()))
        })
        .difference(s)
}

/// Vertex sets inducing forests, grouped by size and in lexicographic order
/// within a size. Every subset of a forest is a forest, so size `k` sets are
/// grown from size `k − 1` ones by adding a vertex above their maximum.
pub struct ForestSubsets<'a> {
    g: &'a Multigraph,
    level: Vec<(VertexSet, usize)>,
    size: usize,
}

impl<'a> ForestSubsets<'a> {
    pub fn new(g: &'a Multigraph) -> Self {
        Self {
            g,
            level: vec![(VertexSet::EMPTY, 0)],
            size: 0,
        }
    }

    /// Forest sets of the current size with their edge counts.
    pub fn level(&self) -> &[(VertexSet, usize)] {
        &self.level
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Advances to the next size; false once no forest of that size exists.
    pub fn advance(&mut self) -> bool {
        let g = self.g;
        let n = g.vertex_count();
        let mut next = Vec::new();
        for &(s, edges) in &self.level {
            let start = s.iter().last().map_or(0, |m| m + 1);
            for v in start..n {
                let t = s.with(v);
                let added = g.degree_within(v, t)
                    - g.adjacency(v)
                        .iter()
                        .filter(|d| g.terminus(**d) == v)
                        .count()
                        / 2;
                let e = edges + added;
                // A forest has exactly |S| − cc edges.
                if e + g.components_within(t).len() == t.len() {
                    next.push((t, e));
                }
            }
        }
        self.size += 1;
        self.level = next;
        !self.level.is_empty()
    }
}

/// Memoized characteristic polynomials of `ℋ` restricted to vertex sets.
struct CharPolys<'a> {
    g: &'a Multigraph,
    w: &'a SchrodingerWeights,
    memo: HashMap<u128, RationalPolynomial>,
}

impl CharPolys<'_> {
    fn get(&mut self, s: VertexSet) -> Result<RationalPolynomial> {
        if let Some(p) = self.memo.get(&s.0) {
            return Ok(p.clone());
        }
        let p = char_poly(&hamiltonian_on(self.g, self.w, s)?)?;
        self.memo.insert(s.0, p.clone());
        Ok(p)
    }
}

/// Visits every forest set `S` with `|∂S| < cc(G[S])` and `|S| ≤ cap`, in
/// order of size then lexicographically. Returns whether the cap cut the
/// search short.
fn for_each_aomoto_set<F>(g: &Multigraph, cap: Option<usize>, mut f: F) -> Result<bool>
where
    F: FnMut(VertexSet, Vec<VertexSet>, VertexSet) -> Result<bool>,
{
    let mut forests = ForestSubsets::new(g);
    loop {
        if cap.is_some_and(|c| forests.size() >= c) {
            return Ok(forests.size() < g.vertex_count() && forests.advance());
        }
        if !forests.advance() {
            return Ok(false);
        }
        for &(s, _) in forests.level() {
            let comps = g.components_within(s);
            let b = boundary(g, s);
            if b.len() < comps.len() && !f(s, comps, b)? {
                return Ok(false);
            }
        }
    }
}

/// First Aomoto set for `λ` by increasing size, searching sets up to `cap`
/// vertices (all sets when `None`).
pub fn bgvm_holds(
    g: &Multigraph,
    w: &SchrodingerWeights,
    lambda: &Rational,
    cap: Option<usize>,
) -> Result<BgvmSearch> {
    w.check_covers(g)?;
    let mut polys = CharPolys {
        g,
        w,
        memo: HashMap::new(),
    };
    let mut found = None;
    let capped = for_each_aomoto_set(g, cap, |s, components, boundary| {
        let mut gcd = RationalPolynomial::zero();
        for c in &components {
            let p = polys.get(*c)?;
            if !p.eval(lambda).is_zero() {
                return Ok(true);
            }
            gcd = poly_gcd(&gcd, &p);
        }
        found = Some(AomotoCertificate {
            s,
            components,
            boundary,
            lambda_poly: gcd,
        });
        Ok(false)
    })?;
    Ok(match (found, capped) {
        (Some(c), _) => BgvmSearch::Found(c),
        (None, true) => BgvmSearch::NoneWithinCap {
            cap: cap.unwrap_or(g.vertex_count()),
        },
        (None, false) => BgvmSearch::NoneExists,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidates {
    /// `(gcd of tree characteristic polynomials, certificate)` for every
    /// Aomoto set whose gcd is nonconstant.
    pub found: Vec<(RationalPolynomial, AomotoCertificate)>,
    /// False when a size cap stopped the search early.
    pub complete: bool,
}

/// Every `λ` passing the criterion, grouped by the set `S` that certifies it.
pub fn bgvm_candidate_lambdas(
    g: &Multigraph,
    w: &SchrodingerWeights,
    cap: Option<usize>,
) -> Result<Candidates> {
    w.check_covers(g)?;
    let mut polys = CharPolys {
        g,
        w,
        memo: HashMap::new(),
    };
    let mut found = Vec::new();
    let capped = for_each_aomoto_set(g, cap, |s, components, boundary| {
        let mut gcd = RationalPolynomial::zero();
        for c in &components {
            gcd = poly_gcd(&gcd, &polys.get(*c)?);
            if gcd.is_constant() {
                return Ok(true);
            }
        }
        found.push((
            gcd.clone(),
            AomotoCertificate {
                s,
                components,
                boundary,
                lambda_poly: gcd,
            },
        ));
        Ok(true)
    })?;
    Ok(Candidates {
        found,
        complete: !capped,
    })
}

/// Checks that each universal-cover eigenvalue is a flat band: rational
/// roots through [`is_flatband`], and every candidate's square-free part
/// divides the flat-band gcd.
#[allow(non_snake_case)]
pub fn check_prop_A2(g: &Multigraph, w: &SchrodingerWeights) -> Result<bool> {
    Ok(prop_a2_violations(g, w)?.is_empty())
}

/// Candidate certificates that break the implication.
pub fn prop_a2_violations(
    g: &Multigraph,
    w: &SchrodingerWeights,
) -> Result<Vec<AomotoCertificate>> {
    let flat = flatband_polynomial(g, w)?.gcd_poly;
    let mut bad = Vec::new();
    let mut checked: HashMap<RationalPolynomial, bool> = HashMap::new();
    for (p, cert) in bgvm_candidate_lambdas(g, w, None)?.found {
        let ok = match checked.get(&p) {
            Some(&ok) => ok,
            None => {
                let mut ok = squarefree_part(&p).divides(&flat);
                for (r, _) in sturm_isolate(&p).rational_roots {
                    ok &= is_flatband(g, w, &r)?.0;
                }
                checked.insert(p.clone(), ok);
                ok
            }
        };
        if !ok {
            bad.push(cert);
        }
    }
    Ok(bad)
}

/// Recomputes every claim in `cert` from scratch: the forest property by
/// union-find over edges, the components, the boundary by scanning edges,
/// and that `lambda_poly` (or `λ`) is shared by every tree's spectrum.
pub fn validate_certificate(
    g: &Multigraph,
    w: &SchrodingerWeights,
    cert: &AomotoCertificate,
    lambda: Option<&Rational>,
) -> Result<bool> {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut bnd = VertexSet::EMPTY;
    for e in g.edges() {
        match (cert.s.contains(e.u), cert.s.contains(e.v)) {
            (true, true) => {
                let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
                if a == b {
                    return Ok(false);
                }
                parent[a] = b;
            }
            (true, false) => bnd = bnd.with(e.v),
            (false, true) => bnd = bnd.with(e.u),
            (false, false) => {}
        }
    }
    if bnd != cert.boundary {
        return Ok(false);
    }
    let mut groups: HashMap<usize, VertexSet> = HashMap::new();
    for v in cert.s.iter() {
        let r = find(&mut parent, v);
        let grp = groups.entry(r).or_insert(VertexSet::EMPTY);
        *grp = grp.with(v);
    }
    let mut comps: Vec<VertexSet> = groups.into_values().collect();
    comps.sort_by_key(|c| c.first());
    if comps != cert.components || cert.boundary.len() >= comps.len() {
        return Ok(false);
    }
    for c in &comps {
        let p = char_poly(&hamiltonian_on(g, w, *c)?)?;
        if !cert.lambda_poly.divides(&p) || lambda.is_some_and(|l| !p.eval(l).is_zero()) {
            return Ok(false);
        }
    }
    Ok(!cert.lambda_poly.is_constant() || lambda.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// Every flat band also passes the universal-cover criterion.
    Agree,
    /// Roots of `residual` are flat bands failing the criterion.
    AbStrictlyLarger {
        residual: RationalPolynomial,
        roots: RootIsolation,
    },
    Inconclusive {
        reason: String,
    },
}

impl Comparison {
    pub fn to_value(&self) -> Value {
        match self {
            Comparison::Agree => json!({ "verdict": "agree" }),
            Comparison::AbStrictlyLarger { residual, roots } => json!({
                "verdict": "ab_strictly_larger",
                "residual": residual.to_text(),
                "roots": roots.to_value(),
            }),
            Comparison::Inconclusive { reason } => {
                json!({ "verdict": "inconclusive", "reason": reason })
            }
        }
    }
}

pub const DEFAULT_COMPARE_MAX_VERTICES: usize = 12;

/// Compares flat bands of the abelian cover with universal-cover eigenvalues
/// at the polynomial level: the square-free flat-band gcd is divided by its
/// gcd with each candidate polynomial, and any leftover real root is a flat
/// band the criterion misses.
pub fn compare_ab_vs_uni(
    g: &Multigraph,
    w: &SchrodingerWeights,
    max_vertices: usize,
) -> Result<Comparison> {
    if g.vertex_count() > max_vertices {
        return Ok(Comparison::Inconclusive {
            reason: format!(
                "{} vertices exceeds the search limit of {max_vertices}",
                g.vertex_count()
            ),
        });
    }
    let flat = squarefree_part(&flatband_polynomial(g, w)?.gcd_poly);
    if flat.is_constant() {
        return Ok(Comparison::Agree);
    }
    let mut rest = flat;
    for (p, _) in bgvm_candidate_lambdas(g, w, None)?.found {
        let common = poly_gcd(&rest, &p);
        if !common.is_constant() {
            rest = rest
                .exact_div(&common)
                .ok_or_else(|| Error::Invariant("gcd does not divide".into()))?;
        }
        if rest.is_constant() {
            return Ok(Comparison::Agree);
        }
    }
    let roots = sturm_isolate(&rest);
    if roots.real_root_count() == 0 {
        return Ok(Comparison::Agree);
    }
    Ok(Comparison::AbStrictlyLarger {
        residual: rest,
        roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    fn adj(g: &Multigraph) -> SchrodingerWeights {
        SchrodingerWeights::adjacency(g)
    }

    #[test]
    fn star_leaves() {
        let g = Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let BgvmSearch::Found(cert) = bgvm_holds(&g, &adj(&g), &rat(0), None).unwrap() else {
            panic!("expected a certificate");
        };
        // Two leaves already form an Aomoto set, and smaller sets come first.
        assert_eq!(cert.s, VertexSet::from_iter([1, 2]));
        assert_eq!(cert.boundary, VertexSet::singleton(0));
        assert!(validate_certificate(&g, &adj(&g), &cert, Some(&rat(0))).unwrap());
        let cands = bgvm_candidate_lambdas(&g, &adj(&g), None).unwrap();
        let leaves = VertexSet::from_iter([1, 2, 3]);
        assert!(cands
            .found
            .iter()
            .any(|(p, c)| *p == RationalPolynomial::x() && c.s == leaves));
        assert!(check_prop_A2(&g, &adj(&g)).unwrap());
    }

    #[test]
    fn single_edge() {
        let g = Multigraph::from_edges(2, &[(0, 1)]);
        let BgvmSearch::Found(cert) = bgvm_holds(&g, &adj(&g), &rat(1), None).unwrap() else {
            panic!("expected a certificate");
        };
        assert_eq!(cert.s, VertexSet::full(2));
        let cands = bgvm_candidate_lambdas(&g, &adj(&g), None).unwrap();
        assert_eq!(cands.found.len(), 1);
        assert_eq!(cands.found[0].0, RationalPolynomial::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn triangle_and_loops() {
        let tri = Multigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(
            bgvm_holds(&tri, &adj(&tri), &rat(2), None).unwrap(),
            BgvmSearch::NoneExists
        );
        let bouquet = Multigraph::from_edges(1, &[(0, 0)]);
        assert!(bgvm_candidate_lambdas(&bouquet, &adj(&bouquet), None)
            .unwrap()
            .found
            .is_empty());
    }

    #[test]
    fn capped_search() {
        let g = Multigraph::from_edges(2, &[(0, 1)]);
        assert_eq!(
            bgvm_holds(&g, &adj(&g), &rat(1), Some(1)).unwrap(),
            BgvmSearch::NoneWithinCap { cap: 1 }
        );
    }

    #[test]
    fn lieb_agrees() {
        let g = Multigraph::from_edges(3, &[(0, 1), (0, 1), (0, 2), (0, 2)]);
        assert!(check_prop_A2(&g, &adj(&g)).unwrap());
        assert_eq!(
            compare_ab_vs_uni(&g, &adj(&g), 12).unwrap(),
            Comparison::Agree
        );
    }
}
