//! Flat bands of the maximal abelian cover.
//!
//! `λ` is an eigenvalue of the lifted operator iff `λ` is a root of
//! `m_{G∖γ}` for every degree-2 subgraph `γ` of `G` (the empty `γ`
//! included), so the flat bands are the roots of the gcd of those
//! polynomials.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num::{BigInt, Zero};
use serde_json::{json, Value};

use crate::combinatorics::{
    enumerate_cycles, enumerate_degree2_subgraphs, orientations, walk_degree2_subgraphs,
    Degree2Subgraph, MatchingPolyTable,
};
use crate::error::{Error, Result};
use crate::graph::{hamiltonian_matrix, hamiltonian_on, Multigraph, SchrodingerWeights, VertexSet};
use crate::number::{format_rational, Rational};
use crate::poly::{
    cauchy_bound, char_poly, count_roots_in_interval, poly_gcd, sturm_isolate, GaussianPolynomial,
    RationalPolynomial, RootIsolation,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatBandReport {
    /// Monic gcd of all `m_{G∖γ}`, or the constant 1.
    pub gcd_poly: RationalPolynomial,
    pub roots: RootIsolation,
    /// `(γ, m_{G∖γ})` in canonical order. Once the running gcd reaches 1 the
    /// walk stops, so this is the full list exactly when `complete`.
    pub per_gamma: Vec<(Degree2Subgraph, RationalPolynomial)>,
    pub complete: bool,
    /// Greedily chosen `γ`s whose polynomials are already coprime; empty iff
    /// there are flat bands.
    pub witness_coprime_set: Vec<Degree2Subgraph>,
}

impl FlatBandReport {
    pub fn has_flat_bands(&self) -> bool {
        !self.gcd_poly.is_constant()
    }

    pub fn to_value(&self) -> Value {
        let roots = self.roots.to_value();
        json!({
            "gcd": self.gcd_poly.to_text(),
            "gcd_coeffs": self.gcd_poly.to_value()["coeffs"],
            "flat_bands": self.has_flat_bands(),
            "rational_roots": roots["rational_roots"],
            "intervals": roots["intervals"],
            "residual_nonreal_degree": roots["residual_nonreal_degree"],
            "gammas_examined": self.per_gamma.len(),
            "complete": self.complete,
            "witness": self.witness_coprime_set.iter().map(Degree2Subgraph::to_value).collect::<Vec<_>>(),
        })
    }
}

fn check_input(g: &Multigraph, w: &SchrodingerWeights) -> Result<()> {
    w.check_covers(g)?;
    if g.vertex_count() == 0 {
        return Err(Error::InvalidGraph("graph has no vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Gcd of `m_{G∖γ}` over all degree-2 subgraphs, with root isolation and a
/// coprimality witness. `g` must be connected.
pub fn flatband_polynomial(g: &Multigraph, w: &SchrodingerWeights) -> Result<FlatBandReport> {
    check_input(g, w)?;
    let mut table = MatchingPolyTable::new(g, w);
    let cycles = enumerate_cycles(g);
    let mut gcd = RationalPolynomial::zero();
    let mut per_gamma = Vec::new();
    let flow = walk_degree2_subgraphs(&cycles, |chosen, covered| {
        let p = table.poly_without(covered);
        gcd = poly_gcd(&gcd, &p);
        let gamma = Degree2Subgraph {
            components: chosen.iter().map(|&i| cycles[i].clone()).collect(),
            covered,
        };
        per_gamma.push((gamma, p));
        if gcd.is_one() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let complete = flow.is_continue();
    let witness_coprime_set = if gcd.is_one() {
        coprime_witness(&per_gamma)
    } else {
        Vec::new()
    };
    Ok(FlatBandReport {
        roots: sturm_isolate(&gcd),
        gcd_poly: gcd,
        per_gamma,
        complete,
        witness_coprime_set,
    })
}

/// Greedy forward pass keeping each `γ` that shrinks the running gcd, then a
/// backward pass dropping any member the rest can do without.
fn coprime_witness(per_gamma: &[(Degree2Subgraph, RationalPolynomial)]) -> Vec<Degree2Subgraph> {
    let mut keep = Vec::new();
    let mut acc = RationalPolynomial::zero();
    for (i, (_, p)) in per_gamma.iter().enumerate() {
        let next = poly_gcd(&acc, p);
        if next != acc {
            keep.push(i);
            acc = next;
            if acc.is_one() {
                break;
            }
        }
    }
    let gcd_of = |idx: &[usize]| {
        idx.iter().fold(RationalPolynomial::zero(), |a, &i| {
            poly_gcd(&a, &per_gamma[i].1)
        })
    };
    let mut k = 0;
    while k < keep.len() {
        let mut rest = keep.clone();
        rest.remove(k);
        if !rest.is_empty() && gcd_of(&rest).is_one() {
            keep = rest;
        } else {
            k += 1;
        }
    }
    keep.into_iter().map(|i| per_gamma[i].0.clone()).collect()
}

/// Flat-band reports for each connected component, keyed by its vertex set.
pub fn flatband_by_component(
    g: &Multigraph,
    w: &SchrodingerWeights,
) -> Result<Vec<(VertexSet, FlatBandReport)>> {
    w.check_covers(g)?;
    g.components_within(g.vertices())
        .into_iter()
        .map(|c| {
            let sub = g.induced_subgraph(c);
            Ok((c, flatband_polynomial(&sub.graph, &w.restrict(&sub))?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatbandWitness {
    /// `m_{G∖γ}(λ)` for every `γ`; all zero.
    Evaluations(Vec<(Degree2Subgraph, Rational)>),
    /// The first `γ` in canonical order with `m_{G∖γ}(λ) ≠ 0`.
    NonRoot {
        gamma: Degree2Subgraph,
        value: Rational,
    },
}

impl FlatbandWitness {
    pub fn to_value(&self) -> Value {
        match self {
            FlatbandWitness::Evaluations(all) => json!({
                "evaluations": all.iter().map(|(g, v)| json!({
                    "gamma": g.to_value(),
                    "value": format_rational(v),
                })).collect::<Vec<_>>(),
            }),
            FlatbandWitness::NonRoot { gamma, value } => json!({
                "gamma": gamma.to_value(),
                "value": format_rational(value),
            }),
        }
    }
}

/// Whether `λ` is a flat band, with the evaluations that decide it.
pub fn is_flatband(
    g: &Multigraph,
    w: &SchrodingerWeights,
    lambda: &Rational,
) -> Result<(bool, FlatbandWitness)> {
    check_input(g, w)?;
    let mut table = MatchingPolyTable::new(g, w);
    let cycles = enumerate_cycles(g);
    let mut evaluations = Vec::new();
    let mut miss = None;
    let _ = walk_degree2_subgraphs(&cycles, |chosen, covered| {
        let value = table.poly_without(covered).eval(lambda);
        let gamma = Degree2Subgraph {
            components: chosen.iter().map(|&i| cycles[i].clone()).collect(),
            covered,
        };
        if value.is_zero() {
            evaluations.push((gamma, value));
            ControlFlow::Continue(())
        } else {
            miss = Some(FlatbandWitness::NonRoot { gamma, value });
            ControlFlow::Break(())
        }
    });
    Ok(match miss {
        Some(witness) => (false, witness),
        None => (true, FlatbandWitness::Evaluations(evaluations)),
    })
}

fn into_real(p: GaussianPolynomial, what: &str) -> Result<RationalPolynomial> {
    p.into_real()
        .map_err(|i| Error::Invariant(format!("{what} has a non-real coefficient at x^{i}")))
}

/// Both sides of `det(λI − ℋ) = Σ_γ (−1)^{cc(γ)} m_{G∖γ}(λ) w_γ`, the sum
/// running over oriented degree-2 subgraphs.
pub fn charpoly_expansion_sides(
    g: &Multigraph,
    w: &SchrodingerWeights,
) -> Result<(RationalPolynomial, RationalPolynomial)> {
    w.check_covers(g)?;
    let lhs = char_poly(&hamiltonian_matrix(g, w)?)?;
    let mut table = MatchingPolyTable::new(g, w);
    let mut rhs = GaussianPolynomial::zero();
    for gamma in enumerate_degree2_subgraphs(g) {
        let m = GaussianPolynomial::from_real(&table.poly_without(gamma.covered));
        for (_, wt) in orientations(&gamma, w) {
            let signed = if gamma.cc() % 2 == 1 { -wt } else { wt };
            rhs.add_assign(&m.scale(&signed));
        }
    }
    Ok((
        lhs,
        into_real(rhs, "oriented expansion of the characteristic polynomial")?,
    ))
}

pub fn verify_charpoly_expansion(g: &Multigraph, w: &SchrodingerWeights) -> Result<bool> {
    let (lhs, rhs) = charpoly_expansion_sides(g, w)?;
    Ok(lhs == rhs)
}

/// Both sides of `m_G(λ) = Σ_γ det(λI − ℋ|_{G∖γ}) w_γ` over oriented `γ`.
pub fn moebius_identity_sides(
    g: &Multigraph,
    w: &SchrodingerWeights,
) -> Result<(RationalPolynomial, RationalPolynomial)> {
    w.check_covers(g)?;
    let lhs = MatchingPolyTable::new(g, w).poly(g.vertices());
    let mut dets: HashMap<u128, GaussianPolynomial> = HashMap::new();
    let mut rhs = GaussianPolynomial::zero();
    for gamma in enumerate_degree2_subgraphs(g) {
        let rest = g.vertices().difference(gamma.covered);
        if let std::collections::hash_map::Entry::Vacant(e) = dets.entry(rest.0) {
            let det = char_poly(&hamiltonian_on(g, w, rest)?)?;
            e.insert(GaussianPolynomial::from_real(&det));
        }
        let det = &dets[&rest.0];
        for (_, wt) in orientations(&gamma, w) {
            rhs.add_assign(&det.scale(&wt));
        }
    }
    Ok((
        lhs,
        into_real(rhs, "Möbius expansion of the matching polynomial")?,
    ))
}

pub fn verify_moebius_identity(g: &Multigraph, w: &SchrodingerWeights) -> Result<bool> {
    let (lhs, rhs) = moebius_identity_sides(g, w)?;
    Ok(lhs == rhs)
}

/// The smallest `k / 10⁶ ≥ 2√(d−1)`.
pub fn ramanujan_bound(d: usize) -> Rational {
    let scaled = BigInt::from(4 * (d as u64 - 1)) * BigInt::from(10u64).pow(12);
    let mut s = scaled.sqrt();
    if &s * &s < scaled {
        s += 1;
    }
    Rational::new(s, BigInt::from(1_000_000))
}

/// Checks that every real root of the adjacency matching polynomial of a
/// `d`-regular `g` lies in `[−b, b]`, `b = ramanujan_bound(d)`.
pub fn heilmann_lieb_check(g: &Multigraph) -> Result<bool> {
    let d = g
        .is_regular()
        .ok_or_else(|| Error::Precondition("graph must be regular".into()))?;
    if d < 2 {
        return Err(Error::Precondition(format!(
            "degree must be at least 2, got {d}"
        )));
    }
    let m = MatchingPolyTable::new(g, &SchrodingerWeights::adjacency(g)).poly(g.vertices());
    let b = ramanujan_bound(d);
    let c = cauchy_bound(&m);
    let total = count_roots_in_interval(&m, &-c.clone(), &c)?;
    let inside =
        count_roots_in_interval(&m, &-b.clone(), &b)? + usize::from(m.eval(&-b.clone()).is_zero());
    Ok(inside == total)
}

/// True iff a connected regular `g` has no flat bands.
pub fn theorem2_check(g: &Multigraph, w: &SchrodingerWeights) -> Result<bool> {
    if g.is_regular().is_none() {
        return Err(Error::Precondition("graph must be regular".into()));
    }
    Ok(!flatband_polynomial(g, w)?.has_flat_bands())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{rat, ratio, GaussianRational};

    fn adj(g: &Multigraph) -> SchrodingerWeights {
        SchrodingerWeights::adjacency(g)
    }

    fn lieb() -> Multigraph {
        Multigraph::from_edges(3, &[(0, 1), (0, 1), (0, 2), (0, 2)])
    }

    fn k4() -> Multigraph {
        Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn flatband_examples() {
        let g = lieb();
        let r = flatband_polynomial(&g, &adj(&g)).unwrap();
        assert_eq!(r.gcd_poly, RationalPolynomial::x());
        assert_eq!(r.roots.rational_roots, vec![(rat(0), 1)]);
        assert!(r.complete && r.witness_coprime_set.is_empty());
        assert_eq!(r.per_gamma.len(), 3);

        let theta = Multigraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]);
        let r = flatband_polynomial(&theta, &adj(&theta)).unwrap();
        assert!(r.gcd_poly.is_one());
        assert_eq!(r.witness_coprime_set.len(), 1);

        let bouquet = Multigraph::from_edges(1, &[(0, 0), (0, 0)]);
        assert!(flatband_polynomial(&bouquet, &adj(&bouquet))
            .unwrap()
            .gcd_poly
            .is_one());

        let split = Multigraph::from_edges(2, &[]);
        assert!(matches!(
            flatband_polynomial(&split, &adj(&split)),
            Err(Error::Disconnected)
        ));
        assert_eq!(
            flatband_by_component(&split, &adj(&split)).unwrap().len(),
            2
        );
    }

    #[test]
    fn is_flatband_examples() {
        let g = lieb();
        assert!(is_flatband(&g, &adj(&g), &rat(0)).unwrap().0);
        let (flat, witness) = is_flatband(&g, &adj(&g), &rat(1)).unwrap();
        assert!(!flat);
        assert_eq!(
            witness,
            FlatbandWitness::NonRoot {
                gamma: Degree2Subgraph::empty(),
                value: rat(-3)
            }
        );
        for l in [rat(0), rat(2), ratio(1, 3)] {
            assert!(!is_flatband(&k4(), &adj(&k4()), &l).unwrap().0);
        }
    }

    #[test]
    fn identities_examples() {
        let digon = Multigraph::from_edges(2, &[(0, 1), (0, 1)]);
        let w = SchrodingerWeights::new(
            vec![
                GaussianRational::from_ints(1, 2),
                GaussianRational::from_ints(-3, 1),
            ],
            vec![rat(0), ratio(1, 2)],
        )
        .unwrap();
        assert!(verify_charpoly_expansion(&digon, &w).unwrap());
        assert!(verify_moebius_identity(&digon, &w).unwrap());

        let tri = Multigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        let (lhs, rhs) = moebius_identity_sides(&tri, &adj(&tri)).unwrap();
        assert_eq!(lhs, RationalPolynomial::from_ints(&[0, -3, 0, 1]));
        assert_eq!(lhs, rhs);

        let single = Multigraph::from_edges(1, &[]);
        let w = SchrodingerWeights::new(vec![], vec![ratio(5, 7)]).unwrap();
        assert!(verify_moebius_identity(&single, &w).unwrap());
        assert!(verify_charpoly_expansion(&k4(), &adj(&k4())).unwrap());
    }

    #[test]
    fn heilmann_lieb_examples() {
        let c4 = Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(heilmann_lieb_check(&c4).unwrap());
        assert!(heilmann_lieb_check(&k4()).unwrap());
        assert!(heilmann_lieb_check(&Multigraph::from_edges(2, &[(0, 1)])).is_err());
        assert_eq!(ramanujan_bound(2), rat(2));
        assert_eq!(ramanujan_bound(3), ratio(2_828_428, 1_000_000));
    }

    #[test]
    fn theorem2_examples() {
        let k33 = Multigraph::from_edges(
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
        );
        assert!(theorem2_check(&k33, &adj(&k33)).unwrap());
        assert!(theorem2_check(&lieb(), &adj(&lieb())).is_err());
    }
}
