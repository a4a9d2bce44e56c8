//! Finite multigraphs with edge identities, Hermitian Schrödinger weights and
//! vertex-subset operations.

use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::number::{GaussianRational, Rational};

/// Largest vertex count a [`VertexSet`] can address.
pub const MAX_VERTICES: usize = 128;

/// Bitmask over vertex indices `0..MAX_VERTICES`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub u128);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        if n == MAX_VERTICES {
            VertexSet(u128::MAX)
        } else {
            VertexSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u128 << v)
    }

    pub fn contains(self, v: usize) -> bool {
        v < MAX_VERTICES && self.0 >> v & 1 == 1
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1u128 << v)
    }

    pub fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !(1u128 << v))
    }

    pub fn union(self, o: Self) -> Self {
        VertexSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        VertexSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        VertexSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: Self) -> bool {
        self.0 & o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(v)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(Self::EMPTY, |s, v| s.with(v))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// An edge traversed in its stored orientation (`forward`) or against it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedEdge {
    pub edge: usize,
    pub forward: bool,
}

impl DirectedEdge {
    pub fn new(edge: usize, forward: bool) -> Self {
        Self { edge, forward }
    }

    pub fn reverse(self) -> Self {
        Self {
            edge: self.edge,
            forward: !self.forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Finite multigraph. Edge `i` has id `i`; `u == v` encodes a self-loop.
///
/// The adjacency index lists, per vertex, every directed edge leaving it: a
/// non-loop edge appears once at each endpoint, a self-loop twice at its vertex
/// (once per orientation), so `degree(v) == adjacency(v).len()`.
#[derive(Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<DirectedEdge>>,
}

impl fmt::Debug for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multigraph")
            .field("n", &self.n)
            .field(
                "edges",
                &self.edges.iter().map(|e| (e.u, e.v)).collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl Multigraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!(
                "{n} vertices exceeds the supported maximum of {MAX_VERTICES}"
            )));
        }
        let mut list = Vec::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {id} references vertex outside 0..{n}"
                )));
            }
            list.push(Edge { u, v });
        }
        let adj = Self::build_adjacency(n, &list);
        Ok(Self {
            n,
            edges: list,
            adj,
        })
    }

    /// Panicking constructor for literals in tests and fixtures.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        Self::new(n, edges).expect("valid multigraph literal")
    }

    fn build_adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<DirectedEdge>> {
        let mut adj = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            adj[e.u].push(DirectedEdge::new(id, true));
            adj[e.v].push(DirectedEdge::new(id, false));
        }
        adj
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// Directed edges leaving `v`.
    pub fn adjacency(&self, v: usize) -> &[DirectedEdge] {
        &self.adj[v]
    }

    pub fn origin(&self, d: DirectedEdge) -> usize {
        let e = self.edges[d.edge];
        if d.forward {
            e.u
        } else {
            e.v
        }
    }

    pub fn terminus(&self, d: DirectedEdge) -> usize {
        self.origin(d.reverse())
    }

    /// A self-loop adds 2.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// `Some(d)` iff every vertex has degree `d`.
    pub fn is_regular(&self) -> Option<usize> {
        if self.n == 0 {
            return None;
        }
        let d = self.degree(0);
        (1..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    /// Degree of `v` counting only edges with both endpoints in `s`.
    pub fn degree_within(&self, v: usize, s: VertexSet) -> usize {
        self.adj[v]
            .iter()
            .filter(|d| s.contains(self.terminus(**d)))
            .count()
    }

    pub fn neighbors_within(&self, v: usize, s: VertexSet) -> VertexSet {
        let mut out = VertexSet::EMPTY;
        for d in &self.adj[v] {
            let t = self.terminus(*d);
            if t != v && s.contains(t) {
                out = out.with(t);
            }
        }
        out
    }

    /// Connected components of `g[s]`, ordered by smallest vertex.
    pub fn components_within(&self, s: VertexSet) -> Vec<VertexSet> {
        let mut rest = s;
        let mut out = Vec::new();
        while let Some(start) = rest.first() {
            let mut comp = VertexSet::singleton(start);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for y in self.neighbors_within(x, s).difference(comp).iter() {
                    comp = comp.with(y);
                    stack.push(y);
                }
            }
            rest = rest.difference(comp);
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components_within(self.vertices()).len() == 1
    }

    /// `g[s]` with dense renumbering; maps back to original ids are returned.
    pub fn induced_subgraph(&self, s: VertexSet) -> InducedSubgraph {
        let vertex_map: Vec<usize> = s.iter().filter(|&v| v < self.n).collect();
        let mut new_index = vec![usize::MAX; self.n];
        for (i, &v) in vertex_map.iter().enumerate() {
            new_index[v] = i;
        }
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if s.contains(e.u) && s.contains(e.v) {
                edges.push((new_index[e.u], new_index[e.v]));
                edge_map.push(id);
            }
        }
        InducedSubgraph {
            graph: Multigraph::from_edges(vertex_map.len(), &edges),
            vertex_map,
            edge_map,
        }
    }

    /// `g ∖ s`.
    pub fn delete_vertices(&self, s: VertexSet) -> InducedSubgraph {
        self.induced_subgraph(self.vertices().difference(s))
    }

    /// Disjoint union; vertices and edges of `other` are shifted past `self`'s.
    pub fn disjoint_union(&self, other: &Multigraph) -> Multigraph {
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.u, e.v)).collect();
        edges.extend(other.edges.iter().map(|e| (e.u + self.n, e.v + self.n)));
        Multigraph::from_edges(self.n + other.n, &edges)
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: Multigraph,
    /// New vertex index → original vertex index.
    pub vertex_map: Vec<usize>,
    /// New edge id → original edge id.
    pub edge_map: Vec<usize>,
}

/// Hermitian weights: `edge_weight[e]` is the weight of the stored orientation
/// `u → v`; the reverse orientation carries the conjugate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchrodingerWeights {
    edge_weight: Vec<GaussianRational>,
    potential: Vec<Rational>,
}

impl SchrodingerWeights {
    pub fn new(edge_weight: Vec<GaussianRational>, potential: Vec<Rational>) -> Result<Self> {
        if let Some(e) = edge_weight.iter().position(|w| w.is_zero()) {
            return Err(Error::ZeroWeight(e));
        }
        Ok(Self {
            edge_weight,
            potential,
        })
    }

    /// `w ≡ 1`, `𝒱 ≡ 0`.
    pub fn adjacency(g: &Multigraph) -> Self {
        Self {
            edge_weight: vec![GaussianRational::one(); g.edge_count()],
            potential: vec![Rational::zero(); g.vertex_count()],
        }
    }

    /// Checks the weights cover every edge and vertex of `g`.
    pub fn check_covers(&self, g: &Multigraph) -> Result<()> {
        if self.edge_weight.len() < g.edge_count() {
            return Err(Error::MissingWeight(self.edge_weight.len()));
        }
        if self.potential.len() < g.vertex_count() {
            return Err(Error::InvalidGraph(format!(
                "missing potential for vertex {}",
                self.potential.len()
            )));
        }
        Ok(())
    }

    pub fn weight(&self, e: usize) -> &GaussianRational {
        &self.edge_weight[e]
    }

    pub fn weights(&self) -> &[GaussianRational] {
        &self.edge_weight
    }

    pub fn potential(&self, v: usize) -> &Rational {
        &self.potential[v]
    }

    pub fn potentials(&self) -> &[Rational] {
        &self.potential
    }

    pub fn directed_weight(&self, d: DirectedEdge) -> GaussianRational {
        let w = &self.edge_weight[d.edge];
        if d.forward {
            w.clone()
        } else {
            w.conj()
        }
    }

    pub fn is_adjacency(&self) -> bool {
        self.edge_weight.iter().all(|w| w.is_one()) && self.potential.iter().all(|p| p.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.edge_weight.iter().all(|w| w.is_real())
    }

    pub fn restrict(&self, sub: &InducedSubgraph) -> Self {
        Self {
            edge_weight: sub
                .edge_map
                .iter()
                .map(|&e| self.edge_weight[e].clone())
                .collect(),
            potential: sub
                .vertex_map
                .iter()
                .map(|&v| self.potential[v].clone())
                .collect(),
        }
    }

    /// Weights for `g.disjoint_union(h)`.
    pub fn disjoint_union(&self, other: &SchrodingerWeights) -> Self {
        let mut edge_weight = self.edge_weight.clone();
        edge_weight.extend(other.edge_weight.iter().cloned());
        let mut potential = self.potential.clone();
        potential.extend(other.potential.iter().cloned());
        Self {
            edge_weight,
            potential,
        }
    }
}

pub type GaussianMatrix = Vec<Vec<GaussianRational>>;

/// `ℋ_{uv} = Σ_{directed e: u→v} w_e + δ_{uv} 𝒱_v`.
pub fn hamiltonian_matrix(g: &Multigraph, w: &SchrodingerWeights) -> Result<GaussianMatrix> {
    w.check_covers(g)?;
    let n = g.vertex_count();
    let mut h = vec![vec![GaussianRational::zero(); n]; n];
    for (u, row) in h.iter_mut().enumerate() {
        for d in g.adjacency(u) {
            let t = g.terminus(*d);
            row[t] = &row[t] + &w.directed_weight(*d);
        }
        row[u] = &row[u] + &GaussianRational::real(w.potential(u).clone());
    }
    Ok(h)
}

/// Restriction of `ℋ` to `g[s]`, indexed by `s` in increasing order.
pub fn hamiltonian_on(
    g: &Multigraph,
    w: &SchrodingerWeights,
    s: VertexSet,
) -> Result<GaussianMatrix> {
    let sub = g.induced_subgraph(s);
    hamiltonian_matrix(&sub.graph, &w.restrict(&sub))
}

pub fn is_hermitian(m: &GaussianMatrix) -> bool {
    let n = m.len();
    (0..n).all(|i| m[i].len() == n && (0..n).all(|j| m[i][j] == m[j][i].conj()))
}
