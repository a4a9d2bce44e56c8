//! Exact flat-band analysis for maximal abelian covers of finite multigraphs.
//!
//! A finite multigraph `G` with Hermitian edge weights and real potentials
//! defines a Schrödinger operator; its pull-back to the maximal abelian cover
//! can carry infinitely degenerate `ℓ²` eigenvalues ("flat bands"). This crate
//! decides which real `λ` are flat bands by taking the gcd of the generalized
//! matching polynomials of `G ∖ γ` over all degree-2 subgraphs `γ`, isolates
//! the roots, and cross-checks the answer by Floquet sampling, compactly
//! supported eigenfunctions on the periodic cover, and the Aomoto-set test for
//! the universal cover.

pub mod bgvm;
pub mod combinatorics;
pub mod decomposition;
pub mod error;
pub mod flatband;
pub mod floquet;
pub mod generators;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod number;
pub mod poly;
pub mod rng;

pub use error::{Error, Result};
