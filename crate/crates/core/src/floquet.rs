//! The `ℤ^|E|`-periodic cover, its Floquet matrices, and compactly supported
//! eigenfunctions.
//!
//! Cell coordinates are indexed by edge id; traversing an edge along its
//! stored orientation adds 1 to its coordinate, against it subtracts 1.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::TAU;

use num::complex::Complex64;
use num::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, SchrodingerWeights};
use crate::linalg::nullspace;
use crate::number::{format_rational, rational_to_f64, Field, GaussianRational, Rational};
use crate::rng::Rng;

pub type ComplexMatrix = Vec<Vec<Complex64>>;

fn to_complex(w: &GaussianRational) -> Complex64 {
    let (re, im) = w.to_f64_pair();
    Complex64::new(re, im)
}

/// `ℋ(z)`: entry `(i, j)` sums `z_e w_e` over edges stored `i → j` and the
/// conjugates over edges stored `j → i`; the diagonal adds `𝒱`.
pub fn floquet_matrix(
    g: &Multigraph,
    w: &SchrodingerWeights,
    z: &[Complex64],
) -> Result<ComplexMatrix> {
    w.check_covers(g)?;
    if z.len() != g.edge_count() {
        return Err(Error::Precondition(format!(
            "torus point has {} coordinates but the graph has {} edges",
            z.len(),
            g.edge_count()
        )));
    }
    if let Some(e) = z.iter().position(|c| (c.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::Precondition(format!(
            "coordinate {e} of the torus point is not unimodular"
        )));
    }
    let n = g.vertex_count();
    let mut h = vec![vec![Complex64::zero(); n]; n];
    for (u, row) in h.iter_mut().enumerate() {
        for d in g.adjacency(u) {
            let zw = z[d.edge] * to_complex(w.weight(d.edge));
            row[g.terminus(*d)] += if d.forward { zw } else { zw.conj() };
        }
        row[u] += rational_to_f64(w.potential(u));
    }
    Ok(h)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps, ascending.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let norm: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let tol = (f64::EPSILON * norm.max(f64::MIN_POSITIVE)).powi(2);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigenvalues of a Hermitian matrix, ascending, via the real embedding
/// `[[Re, −Im], [Im, Re]]` whose spectrum is the original one doubled.
pub fn hermitian_eigenvalues(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let x = h[i][j];
            a[i][j] = x.re;
            a[i + n][j + n] = x.re;
            a[i][j + n] = -x.im;
            a[i + n][j] = x.im;
        }
    }
    symmetric_eigenvalues(a).into_iter().step_by(2).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloquetSample {
    pub thetas: Vec<f64>,
    pub z: Vec<Complex64>,
    pub eigenvalues: Vec<f64>,
}

/// `samples` torus points `z_e = exp(2πi·u)` drawn in order from one seeded
/// stream (all coordinates of a sample before the next), with spectra.
pub fn floquet_samples(
    g: &Multigraph,
    w: &SchrodingerWeights,
    samples: usize,
    seed: u64,
) -> Result<Vec<FloquetSample>> {
    w.check_covers(g)?;
    let mut rng = Rng::new(seed);
    let thetas: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..g.edge_count()).map(|_| TAU * rng.unit()).collect())
        .collect();
    thetas
        .into_par_iter()
        .map(|thetas| {
            let z: Vec<Complex64> = thetas
                .iter()
                .map(|&t| Complex64::from_polar(1.0, t))
                .collect();
            let eigenvalues = hermitian_eigenvalues(&floquet_matrix(g, w, &z)?);
            Ok(FloquetSample {
                thetas,
                z,
                eigenvalues,
            })
        })
        .collect()
}

pub fn min_distance(eigenvalues: &[f64], lambda: f64) -> f64 {
    eigenvalues
        .iter()
        .map(|e| (e - lambda).abs())
        .fold(f64::INFINITY, f64::min)
}

/// `min |eig ℋ(z) − λ|`.
pub fn min_distance_at(
    g: &Multigraph,
    w: &SchrodingerWeights,
    lambda: &Rational,
    z: &[Complex64],
) -> Result<f64> {
    let eig = hermitian_eigenvalues(&floquet_matrix(g, w, z)?);
    Ok(min_distance(&eig, rational_to_f64(lambda)))
}

/// Max over seeded torus samples of the distance from `λ` to the spectrum
/// of `ℋ(z)`. Near zero at every sample is the signature of a flat band.
pub fn sample_flatband_numeric(
    g: &Multigraph,
    w: &SchrodingerWeights,
    lambda: &Rational,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let l = rational_to_f64(lambda);
    Ok(floquet_samples(g, w, samples, seed)?
        .iter()
        .map(|s| min_distance(&s.eigenvalues, l))
        .fold(0.0, f64::max))
}

/// A vertex `(cell, site)` of the periodic cover; `cell` stores only nonzero
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicVertex {
    pub cell: BTreeMap<usize, i64>,
    pub site: usize,
}

impl PeriodicVertex {
    pub fn origin(site: usize) -> Self {
        Self {
            cell: BTreeMap::new(),
            site,
        }
    }

    fn shifted(&self, edge: usize, delta: i64, site: usize) -> Self {
        let mut cell = self.cell.clone();
        let c = cell.entry(edge).or_insert(0);
        *c += delta;
        if *c == 0 {
            cell.remove(&edge);
        }
        Self { cell, site }
    }

    pub fn to_value(&self) -> Value {
        let cell: BTreeMap<String, i64> =
            self.cell.iter().map(|(e, c)| (e.to_string(), *c)).collect();
        json!({ "cell": cell, "site": self.site })
    }
}

/// One neighbour per directed edge leaving the site, with that edge's weight.
pub fn periodic_neighbors(
    g: &Multigraph,
    w: &SchrodingerWeights,
    pv: &PeriodicVertex,
) -> Vec<(PeriodicVertex, GaussianRational)> {
    g.adjacency(pv.site)
        .iter()
        .map(|d| {
            let delta = if d.forward { 1 } else { -1 };
            (
                pv.shifted(d.edge, delta, g.terminus(*d)),
                w.directed_weight(*d),
            )
        })
        .collect()
}

/// Breadth-first ball of the given radius around `(0, site)`, in BFS order.
pub fn periodic_ball(
    g: &Multigraph,
    w: &SchrodingerWeights,
    site: usize,
    radius: usize,
) -> Vec<(PeriodicVertex, usize)> {
    let start = PeriodicVertex::origin(site);
    let mut dist = HashMap::from([(start.clone(), 0usize)]);
    let mut order = vec![(start.clone(), 0)];
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[&x];
        if dx == radius {
            continue;
        }
        for (y, _) in periodic_neighbors(g, w, &x) {
            if !dist.contains_key(&y) {
                dist.insert(y.clone(), dx + 1);
                order.push((y.clone(), dx + 1));
                queue.push_back(y);
            }
        }
    }
    order
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactEigenfunction {
    pub lambda: Rational,
    pub radius: usize,
    /// Nonzero values only, in BFS order of the ball.
    pub values: Vec<(PeriodicVertex, GaussianRational)>,
    /// Number of cover vertices where the eigenvalue equation was imposed.
    pub constraints: usize,
}

impl CompactEigenfunction {
    pub fn to_value(&self) -> Value {
        json!({
            "lambda": format_rational(&self.lambda),
            "radius": self.radius,
            "constraints": self.constraints,
            "support": self.values.iter().map(|(v, x)| json!({
                "vertex": v.to_value(),
                "re": format_rational(&x.re),
                "im": format_rational(&x.im),
            })).collect::<Vec<_>>(),
        })
    }
}

/// `(ℋ − λ)ψ` on every vertex of the cover where it can be nonzero, that is
/// on the support of `ψ` and its neighbours.
pub fn periodic_residual(
    g: &Multigraph,
    w: &SchrodingerWeights,
    lambda: &Rational,
    psi: &[(PeriodicVertex, GaussianRational)],
) -> Vec<(PeriodicVertex, GaussianRational)> {
    let values: HashMap<&PeriodicVertex, &GaussianRational> =
        psi.iter().map(|(v, x)| (v, x)).collect();
    let mut sites: Vec<PeriodicVertex> = psi.iter().map(|(v, _)| v.clone()).collect();
    for (v, _) in psi {
        sites.extend(periodic_neighbors(g, w, v).into_iter().map(|(y, _)| y));
    }
    sites.sort();
    sites.dedup();
    sites
        .into_iter()
        .map(|x| {
            let diag = GaussianRational::real(w.potential(x.site) - lambda);
            let mut acc = values
                .get(&x)
                .map_or_else(GaussianRational::zero, |v| &diag * v);
            for (y, wt) in periodic_neighbors(g, w, &x) {
                if let Some(v) = values.get(&y) {
                    acc = &acc + &(&wt * v);
                }
            }
            (x, acc)
        })
        .collect()
}

/// Searches for `ψ ≠ 0` supported in the radius-`R` ball around `(0, 0)`
/// with `(ℋ − λ)ψ = 0` everywhere, by an exact null-space computation with
/// the equation imposed on the radius-`R+1` ball. `None` only means no such
/// `ψ` fits in this ball.
pub fn find_compact_eigenfunction(
    g: &Multigraph,
    w: &SchrodingerWeights,
    lambda: &Rational,
    radius: usize,
) -> Result<Option<CompactEigenfunction>> {
    w.check_covers(g)?;
    if radius == 0 {
        return Err(Error::Precondition("radius must be at least 1".into()));
    }
    if g.vertex_count() == 0 {
        return Err(Error::InvalidGraph("graph has no vertices".into()));
    }
    let ball = periodic_ball(g, w, 0, radius + 1);
    let unknowns = ball.iter().take_while(|(_, d)| *d <= radius).count();
    let index: HashMap<&PeriodicVertex, usize> =
        ball.iter().enumerate().map(|(i, (v, _))| (v, i)).collect();
    let mut rows = vec![vec![GaussianRational::zero(); unknowns]; ball.len()];
    for (r, (x, _)) in ball.iter().enumerate() {
        if r < unknowns {
            rows[r][r] = GaussianRational::real(w.potential(x.site) - lambda);
        }
        for (y, wt) in periodic_neighbors(g, w, x) {
            if let Some(&c) = index.get(&y) {
                if c < unknowns {
                    rows[r][c] = &rows[r][c] + &wt;
                }
            }
        }
    }
    let solution: Option<Vec<GaussianRational>> = if w.is_real() {
        let real: Vec<Vec<Rational>> = rows
            .iter()
            .map(|row| row.iter().map(|x| x.re.clone()).collect())
            .collect();
        first_null_vector(real, unknowns)
            .map(|v| v.into_iter().map(GaussianRational::real).collect())
    } else {
        first_null_vector(rows, unknowns)
    };
    Ok(solution.map(|psi| CompactEigenfunction {
        lambda: lambda.clone(),
        radius,
        values: ball
            .iter()
            .zip(psi)
            .filter(|(_, x)| !x.is_zero())
            .map(|((v, _), x)| (v.clone(), x))
            .collect(),
        constraints: ball.len(),
    }))
}

/// Null vector with the smallest support among the basis vectors.
fn first_null_vector<F: Field>(rows: Vec<Vec<F>>, ncols: usize) -> Option<Vec<F>> {
    nullspace(rows, ncols)
        .into_iter()
        .min_by_key(|v| v.iter().filter(|x| !x.is_zero()).count())
}
