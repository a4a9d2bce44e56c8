//! Matchings, generalized matching polynomials, cycles, degree-2 subgraphs
//! and 2-factors.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num::{One, Zero};
use serde_json::{json, Value};

use crate::decomposition::{bridge_block_decomposition, find_bridges};
use crate::error::{Error, Result};
use crate::graph::{DirectedEdge, Multigraph, SchrodingerWeights, VertexSet};
use crate::number::{GaussianRational, Rational};
use crate::poly::RationalPolynomial;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    /// Sorted.
    pub edge_ids: Vec<usize>,
    pub covered: VertexSet,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_ids.is_empty()
    }

    pub fn to_value(&self) -> Value {
        json!({ "edges": self.edge_ids })
    }
}

/// Lazy enumeration of all matchings in lexicographic order of their sorted
/// edge ids, starting with the empty matching. Self-loops never appear.
pub struct Matchings<'a> {
    g: &'a Multigraph,
    chosen: Vec<usize>,
    covered: VertexSet,
    next: usize,
    started: bool,
    done: bool,
}

pub fn enumerate_matchings(g: &Multigraph) -> Matchings<'_> {
    Matchings {
        g,
        chosen: Vec::new(),
        covered: VertexSet::EMPTY,
        next: 0,
        started: false,
        done: false,
    }
}

impl Matchings<'_> {
    fn current(&self) -> Matching {
        Matching {
            edge_ids: self.chosen.clone(),
            covered: self.covered,
        }
    }
}

impl Iterator for Matchings<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current());
        }
        loop {
            let g = self.g;
            let covered = self.covered;
            let free = (self.next..g.edge_count()).find(|&e| {
                let ed = g.edge(e);
                !ed.is_loop() && !covered.contains(ed.u) && !covered.contains(ed.v)
            });
            match free {
                Some(e) => {
                    let ed = g.edge(e);
                    self.chosen.push(e);
                    self.covered = covered.with(ed.u).with(ed.v);
                    self.next = e + 1;
                    return Some(self.current());
                }
                None => match self.chosen.pop() {
                    Some(e) => {
                        let ed = g.edge(e);
                        self.covered = covered.without(ed.u).without(ed.v);
                        self.next = e + 1;
                    }
                    None => {
                        self.done = true;
                        return None;
                    }
                },
            }
        }
    }
}

/// Matching polynomial straight from the definition: a signed sum over all
/// matchings of `Π |w_e|² · Π_{u uncovered} (x − 𝒱_u)`.
pub fn matching_poly_enum(g: &Multigraph, w: &SchrodingerWeights) -> RationalPolynomial {
    let mut total = RationalPolynomial::zero();
    for m in enumerate_matchings(g) {
        let mut c: Rational = m.edge_ids.iter().map(|&e| w.weight(e).norm_sqr()).product();
        if m.len() % 2 == 1 {
            c = -c;
        }
        let mut term = RationalPolynomial::constant(c);
        for u in g.vertices().difference(m.covered).iter() {
            term = &term * &RationalPolynomial::linear(w.potential(u));
        }
        total = &total + &term;
    }
    total
}

/// Memoized vertex-deletion recursion for `m_{G[S]}`.
///
/// Subproblems are induced subgraphs, keyed by their vertex set. Disconnected
/// sets factor into their components; otherwise the pivot is the
/// lowest-index vertex of minimum degree in `G[S]`.
pub struct MatchingPolyTable {
    n: usize,
    potential: Vec<Rational>,
    nbrs: Vec<VertexSet>,
    /// `Σ |w_e|²` over edges joining `u < v`.
    pair: HashMap<(usize, usize), Rational>,
    memo: HashMap<u128, RationalPolynomial>,
}

impl MatchingPolyTable {
    pub fn new(g: &Multigraph, w: &SchrodingerWeights) -> Self {
        let n = g.vertex_count();
        let mut nbrs = vec![VertexSet::EMPTY; n];
        let mut pair: HashMap<(usize, usize), Rational> = HashMap::new();
        for (id, e) in g.edges().iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            nbrs[e.u] = nbrs[e.u].with(e.v);
            nbrs[e.v] = nbrs[e.v].with(e.u);
            let key = (e.u.min(e.v), e.u.max(e.v));
            let acc = pair.entry(key).or_insert_with(Rational::zero);
            *acc += w.weight(id).norm_sqr();
        }
        Self {
            n,
            potential: w.potentials()[..n].to_vec(),
            nbrs,
            pair,
            memo: HashMap::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// `m_{G[s]}`.
    pub fn poly(&mut self, s: VertexSet) -> RationalPolynomial {
        if let Some(p) = self.memo.get(&s.0) {
            return p.clone();
        }
        let p = self.compute(s);
        self.memo.insert(s.0, p.clone());
        p
    }

    /// `m_{G ∖ s}`.
    pub fn poly_without(&mut self, s: VertexSet) -> RationalPolynomial {
        self.poly(VertexSet::full(self.n).difference(s))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn component_of(&self, start: usize, s: VertexSet) -> VertexSet {
        let mut comp = VertexSet::singleton(start);
        let mut frontier = comp;
        while !frontier.is_empty() {
            let mut grown = VertexSet::EMPTY;
            for x in frontier.iter() {
                grown = grown.union(self.nbrs[x]);
            }
            frontier = grown.intersection(s).difference(comp);
            comp = comp.union(frontier);
        }
        comp
    }

    fn compute(&mut self, s: VertexSet) -> RationalPolynomial {
        let Some(first) = s.first() else {
            return RationalPolynomial::one();
        };
        let comp = self.component_of(first, s);
        if comp != s {
            let a = self.poly(comp);
            let b = self.poly(s.difference(comp));
            return &a * &b;
        }
        let pivot = s
            .iter()
            .min_by_key(|&v| (self.nbrs[v].intersection(s).len(), v))
            .expect("nonempty set");
        self.recursion_at(s, pivot)
    }

    /// Right-hand side of the deletion recursion at pivot `v ∈ s`:
    /// `(x − 𝒱_v)·m_{S−v} − Σ_{u∼v} (Σ_e |w_e|²)·m_{S−v−u}`.
    pub fn recursion_at(&mut self, s: VertexSet, v: usize) -> RationalPolynomial {
        let rest = s.without(v);
        let mut out = &RationalPolynomial::linear(&self.potential[v]) * &self.poly(rest);
        for u in self.nbrs[v].intersection(rest).iter() {
            let c = self.pair[&(u.min(v), u.max(v))].clone();
            let sub = self.poly(rest.without(u));
            out = &out - &sub.scale(&c);
        }
        out
    }
}

pub fn matching_poly(g: &Multigraph, w: &SchrodingerWeights) -> RationalPolynomial {
    MatchingPolyTable::new(g, w).poly(g.vertices())
}

/// `m_{G[s]}`.
pub fn matching_poly_on(
    g: &Multigraph,
    w: &SchrodingerWeights,
    s: VertexSet,
) -> RationalPolynomial {
    MatchingPolyTable::new(g, w).poly(s)
}

/// Checks the deletion recursion at every pivot vertex of `G`.
pub fn verify_recursion_identity(g: &Multigraph, w: &SchrodingerWeights) -> bool {
    let mut table = MatchingPolyTable::new(g, w);
    let all = g.vertices();
    let target = matching_poly_enum(g, w);
    table.poly(all) == target && (0..g.vertex_count()).all(|v| table.recursion_at(all, v) == target)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleKind {
    SelfLoop,
    /// Two distinct parallel edges.
    Digon,
    /// At least three edges on distinct vertices.
    Polygon,
}

/// A simple cycle in canonical orientation: it starts at its smallest vertex
/// and leaves along the lower-id of that vertex's two cycle edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cycle {
    pub edges: Vec<DirectedEdge>,
    pub vertices: VertexSet,
}

impl Cycle {
    pub fn kind(&self) -> CycleKind {
        match self.edges.len() {
            1 => CycleKind::SelfLoop,
            2 => CycleKind::Digon,
            _ => CycleKind::Polygon,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.edges.iter().map(|d| d.edge).collect();
        ids.sort_unstable();
        ids
    }

    /// Opposite traversal direction.
    pub fn reversed(&self) -> Vec<DirectedEdge> {
        self.edges.iter().rev().map(|d| d.reverse()).collect()
    }
}

/// Every simple cycle of `g` once: self-loops, digons, and polygons, sorted
/// by their sorted edge-id lists.
pub fn enumerate_cycles(g: &Multigraph) -> Vec<Cycle> {
    let mut out = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        if e.is_loop() {
            out.push(Cycle {
                edges: vec![DirectedEdge::new(id, true)],
                vertices: VertexSet::singleton(e.u),
            });
        }
    }
    let mut path = Vec::new();
    for s in 0..g.vertex_count() {
        cycles_from(g, s, s, VertexSet::singleton(s), &mut path, &mut out);
    }
    out.sort_by_cached_key(Cycle::edge_ids);
    out
}

/// Paths from `s` through vertices above `s`; a cycle closes only when its
/// first edge id is below its closing edge id, so each appears once.
fn cycles_from(
    g: &Multigraph,
    s: usize,
    x: usize,
    visited: VertexSet,
    path: &mut Vec<DirectedEdge>,
    out: &mut Vec<Cycle>,
) {
    for &d in g.adjacency(x) {
        if g.edge(d.edge).is_loop() {
            continue;
        }
        let t = g.terminus(d);
        if t == s {
            if path.first().is_some_and(|f| f.edge < d.edge) {
                let mut edges = path.clone();
                edges.push(d);
                out.push(Cycle {
                    edges,
                    vertices: visited,
                });
            }
        } else if t > s && !visited.contains(t) {
            path.push(d);
            cycles_from(g, s, t, visited.with(t), path, out);
            path.pop();
        }
    }
}

/// Vertex-disjoint union of cycles; the empty value is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Degree2Subgraph {
    /// Sorted by sorted edge ids.
    pub components: Vec<Cycle>,
    pub covered: VertexSet,
}

impl Degree2Subgraph {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_cycles(mut components: Vec<Cycle>) -> Self {
        components.sort_by_cached_key(Cycle::edge_ids);
        let covered = components
            .iter()
            .fold(VertexSet::EMPTY, |acc, c| acc.union(c.vertices));
        Self {
            components,
            covered,
        }
    }

    /// Builds the canonical form of the subgraph with edge set `ids`.
    pub fn from_edge_ids(g: &Multigraph, ids: &[usize]) -> Result<Self> {
        let n = g.vertex_count();
        let mut seen = vec![false; g.edge_count()];
        let mut at: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut deg = vec![0usize; n];
        for &e in ids {
            if e >= g.edge_count() || std::mem::replace(&mut seen[e], true) {
                return Err(Error::Invariant(format!("edge {e} is missing or repeated")));
            }
            let ed = g.edge(e);
            at[ed.u].push(e);
            if !ed.is_loop() {
                at[ed.v].push(e);
            }
            deg[ed.u] += 1;
            deg[ed.v] += 1;
        }
        if let Some(v) = (0..n).find(|&v| deg[v] != 0 && deg[v] != 2) {
            return Err(Error::Invariant(format!(
                "vertex {v} has degree {} in the subgraph",
                deg[v]
            )));
        }
        let mut done = VertexSet::EMPTY;
        let mut components = Vec::new();
        for s in 0..n {
            if deg[s] == 0 || done.contains(s) {
                continue;
            }
            let mut first = at[s].clone();
            first.sort_unstable();
            let e0 = first[0];
            if g.edge(e0).is_loop() {
                done = done.with(s);
                components.push(Cycle {
                    edges: vec![DirectedEdge::new(e0, true)],
                    vertices: VertexSet::singleton(s),
                });
                continue;
            }
            let mut edges = Vec::new();
            let mut vertices = VertexSet::singleton(s);
            let mut cur = DirectedEdge::new(e0, g.edge(e0).u == s);
            loop {
                edges.push(cur);
                let t = g.terminus(cur);
                if t == s {
                    break;
                }
                vertices = vertices.with(t);
                let next = *at[t].iter().find(|&&e| e != cur.edge).expect("degree 2");
                cur = DirectedEdge::new(next, g.edge(next).u == t);
            }
            done = done.union(vertices);
            components.push(Cycle { edges, vertices });
        }
        Ok(Self::from_cycles(components))
    }

    pub fn cc(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn edge_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .components
            .iter()
            .flat_map(|c| c.edges.iter().map(|d| d.edge))
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn to_value(&self) -> Value {
        let comps: Vec<Vec<usize>> = self
            .components
            .iter()
            .map(|c| c.edges.iter().map(|d| d.edge).collect())
            .collect();
        json!({ "components": comps })
    }
}

/// Preorder walk over every vertex-disjoint selection of `cycles` (indices
/// increasing), the empty selection first. `f` sees the chosen indices and
/// the covered vertices and may stop the walk.
pub fn walk_degree2_subgraphs<F>(cycles: &[Cycle], mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[usize], VertexSet) -> ControlFlow<()>,
{
    let mut chosen = Vec::new();
    walk_from(cycles, 0, &mut chosen, VertexSet::EMPTY, &mut f)
}

fn walk_from<F>(
    cycles: &[Cycle],
    start: usize,
    chosen: &mut Vec<usize>,
    covered: VertexSet,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize], VertexSet) -> ControlFlow<()>,
{
    f(chosen, covered)?;
    for i in start..cycles.len() {
        if cycles[i].vertices.is_disjoint(covered) {
            chosen.push(i);
            walk_from(cycles, i + 1, chosen, covered.union(cycles[i].vertices), f)?;
            chosen.pop();
        }
    }
    ControlFlow::Continue(())
}

/// All degree-2 subgraphs, the empty one first.
pub fn enumerate_degree2_subgraphs(g: &Multigraph) -> Vec<Degree2Subgraph> {
    let cycles = enumerate_cycles(g);
    let mut out = Vec::new();
    let _ = walk_degree2_subgraphs(&cycles, |chosen, covered| {
        out.push(Degree2Subgraph {
            components: chosen.iter().map(|&i| cycles[i].clone()).collect(),
            covered,
        });
        ControlFlow::Continue(())
    });
    out
}

/// A degree-2 subgraph with a traversal direction per component; bit `i` of
/// `flips` reverses component `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientedDegree2Subgraph {
    pub base: Degree2Subgraph,
    pub flips: u128,
}

impl OrientedDegree2Subgraph {
    pub fn directed_edges(&self) -> Vec<DirectedEdge> {
        let mut out = Vec::new();
        for (i, c) in self.base.components.iter().enumerate() {
            if self.flips >> i & 1 == 1 {
                out.extend(c.reversed());
            } else {
                out.extend(c.edges.iter().copied());
            }
        }
        out
    }

    /// `w_γ`, the product of the directed weights.
    pub fn weight(&self, w: &SchrodingerWeights) -> GaussianRational {
        self.directed_edges()
            .into_iter()
            .fold(GaussianRational::one(), |acc, d| {
                &acc * &w.directed_weight(d)
            })
    }

    /// Per-edge signed traversal counts (`+1` along the stored orientation).
    pub fn z_exponents(&self, edge_count: usize) -> Vec<i64> {
        let mut z = vec![0i64; edge_count];
        for d in self.directed_edges() {
            z[d.edge] += if d.forward { 1 } else { -1 };
        }
        z
    }
}

/// The `2^cc` orientations of `gamma` with their weights.
pub fn orientations(
    gamma: &Degree2Subgraph,
    w: &SchrodingerWeights,
) -> Vec<(OrientedDegree2Subgraph, GaussianRational)> {
    let cc = gamma.cc();
    assert!(cc < 64, "too many components to orient");
    (0..1u128 << cc)
        .map(|flips| {
            let o = OrientedDegree2Subgraph {
                base: gamma.clone(),
                flips,
            };
            let wt = o.weight(w);
            (o, wt)
        })
        .collect()
}

/// Perfect matchings, built by always matching the lowest uncovered vertex.
pub fn enumerate_perfect_matchings(g: &Multigraph) -> impl Iterator<Item = Matching> {
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    perfect_from(g, g.vertices(), &mut chosen, &mut out);
    out.into_iter()
}

fn perfect_from(
    g: &Multigraph,
    uncovered: VertexSet,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Matching>,
) {
    let Some(v) = uncovered.first() else {
        let mut edge_ids = chosen.clone();
        edge_ids.sort_unstable();
        out.push(Matching {
            edge_ids,
            covered: g.vertices(),
        });
        return;
    };
    for d in g.adjacency(v) {
        let t = g.terminus(*d);
        if t != v && uncovered.contains(t) {
            chosen.push(d.edge);
            perfect_from(g, uncovered.without(v).without(t), chosen, out);
            chosen.pop();
        }
    }
}

/// A spanning degree-2 subgraph, if any.
///
/// Backtracking that always serves the lowest vertex still short of degree 2,
/// trying its free edges by increasing id, with a capacity check per step.
pub fn find_2factor(g: &Multigraph) -> Option<Degree2Subgraph> {
    let mut state = FactorSearch {
        g,
        need: vec![2u8; g.vertex_count()],
        used: vec![false; g.edge_count()],
        chosen: Vec::new(),
    };
    state.search(None).then(|| {
        Degree2Subgraph::from_edge_ids(g, &state.chosen).expect("search yields a 2-factor")
    })
}

struct FactorSearch<'a> {
    g: &'a Multigraph,
    need: Vec<u8>,
    used: Vec<bool>,
    chosen: Vec<usize>,
}

impl FactorSearch<'_> {
    fn feasible(&self) -> bool {
        (0..self.g.vertex_count()).all(|v| {
            if self.need[v] == 0 {
                return true;
            }
            let mut cap = 0u32;
            for d in self.g.adjacency(v) {
                if self.used[d.edge] {
                    continue;
                }
                let t = self.g.terminus(*d);
                if t == v {
                    if d.forward && self.need[v] == 2 {
                        cap += 2;
                    }
                } else if self.need[t] > 0 {
                    cap += 1;
                }
            }
            cap >= self.need[v] as u32
        })
    }

    fn search(&mut self, last: Option<(usize, usize)>) -> bool {
        let g = self.g;
        let Some(v) = (0..g.vertex_count()).find(|&v| self.need[v] > 0) else {
            return true;
        };
        if !self.feasible() {
            return false;
        }
        let min_id = match last {
            Some((lv, le)) if lv == v => le + 1,
            _ => 0,
        };
        let mut cands: Vec<usize> = g
            .adjacency(v)
            .iter()
            .map(|d| d.edge)
            .filter(|&e| e >= min_id && !self.used[e])
            .collect();
        cands.sort_unstable();
        cands.dedup();
        for e in cands {
            let ed = g.edge(e);
            let u = ed.other(v);
            if ed.is_loop() {
                if self.need[v] != 2 {
                    continue;
                }
                self.need[v] = 0;
            } else {
                if self.need[u] == 0 {
                    continue;
                }
                self.need[v] -= 1;
                self.need[u] -= 1;
            }
            self.used[e] = true;
            self.chosen.push(e);
            if self.search(Some((v, e))) {
                return true;
            }
            self.chosen.pop();
            self.used[e] = false;
            if ed.is_loop() {
                self.need[v] = 2;
            } else {
                self.need[v] += 1;
                self.need[u] += 1;
            }
        }
        false
    }
}

fn check_odd_degree_bound(d: usize) -> Result<()> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "d must be odd and at least 3, got {d}"
        )));
    }
    Ok(())
}

/// 2-factor of a connected bridge-less graph with maximum degree at most odd
/// `d` and total deficit `Σ (d − deg v) ≤ d − 1`.
///
/// Each missing degree is topped up by a bouquet of `(d−1)/2` loops hung on
/// a new bridge; the resulting `d`-regular graph is searched for a 2-factor,
/// which cannot use the bridges and so restricts to `g`.
pub fn two_factor_with_deficit(g: &Multigraph, d: usize) -> Result<Degree2Subgraph> {
    check_odd_degree_bound(d)?;
    if !g.is_connected() {
        return Err(Error::Precondition("graph must be connected".into()));
    }
    if !find_bridges(g).is_empty() {
        return Err(Error::Precondition("graph must be bridge-less".into()));
    }
    if g.max_degree() > d {
        return Err(Error::Precondition(format!(
            "maximum degree {} exceeds d = {d}",
            g.max_degree()
        )));
    }
    let n = g.vertex_count();
    let deficit: usize = (0..n).map(|v| d - g.degree(v)).sum();
    if deficit > d - 1 {
        return Err(Error::Precondition(format!(
            "total degree deficit {deficit} exceeds d - 1 = {}",
            d - 1
        )));
    }
    let mut pairs = g.edge_pairs();
    let mut next = n;
    for v in 0..n {
        for _ in g.degree(v)..d {
            pairs.push((v, next));
            pairs.extend(std::iter::repeat_n((next, next), (d - 1) / 2));
            next += 1;
        }
    }
    let padded = Multigraph::new(next, &pairs)?;
    let factor = find_2factor(&padded)
        .ok_or_else(|| Error::Invariant("padded regular graph has no 2-factor".into()))?;
    let ids: Vec<usize> = factor
        .edge_ids()
        .into_iter()
        .filter(|&e| e < g.edge_count())
        .collect();
    Degree2Subgraph::from_edge_ids(g, &ids)
}

/// Two degree-2 subgraphs of a connected bridge-less graph with maximum
/// degree `d` (odd): the first covers `v`, the second avoids it, and both
/// cover every vertex of degree `d`. `v` must have degree below `d`.
#[allow(non_snake_case)]
pub fn typeII_degree2_pair(
    g: &Multigraph,
    v: usize,
    d: usize,
) -> Result<(Degree2Subgraph, Degree2Subgraph)> {
    check_odd_degree_bound(d)?;
    if v >= g.vertex_count() {
        return Err(Error::Precondition(format!(
            "vertex {v} is not in the graph"
        )));
    }
    if !g.is_connected() {
        return Err(Error::Precondition("graph must be connected".into()));
    }
    if !find_bridges(g).is_empty() {
        return Err(Error::Precondition("graph must be bridge-less".into()));
    }
    if g.max_degree() != d {
        return Err(Error::Precondition(format!(
            "maximum degree is {}, expected d = {d}",
            g.max_degree()
        )));
    }
    if g.degree(v) >= d {
        return Err(Error::Precondition(format!(
            "vertex {v} has degree {d}, so it is not deficient"
        )));
    }
    let (with_v, without_v) = typeii_edges(g, v, d)?;
    Ok((
        Degree2Subgraph::from_edge_ids(g, &with_v)?,
        Degree2Subgraph::from_edge_ids(g, &without_v)?,
    ))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Origin {
    Kept(usize),
    NewLoop,
    /// One of the parallel edges `v₁–v₁'`.
    Split,
    /// The edge `v₁'–u` standing in for the removed `v₁–u`.
    Link,
}

fn typeii_edges(g: &Multigraph, v: usize, d: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = g.vertex_count();
    let Some(v1) = (0..n).find(|&x| x != v && g.degree(x) < d) else {
        return typeii_base(g, v, d);
    };
    let deg = g.degree(v1);
    let mut pairs = Vec::new();
    let mut origin = Vec::new();
    let mut removed = None;
    let mut n_prime = n;
    if deg % 2 == 1 {
        for (id, e) in g.edges().iter().enumerate() {
            pairs.push((e.u, e.v));
            origin.push(Origin::Kept(id));
        }
        for _ in 0..(d - deg) / 2 {
            pairs.push((v1, v1));
            origin.push(Origin::NewLoop);
        }
    } else {
        let u = g
            .neighbors_within(v1, g.vertices())
            .first()
            .expect("connected graph with two or more vertices");
        let e0 = g
            .adjacency(v1)
            .iter()
            .map(|dir| dir.edge)
            .filter(|&e| g.edge(e).other(v1) == u)
            .min()
            .expect("u is a neighbour");
        removed = Some(e0);
        for (id, e) in g.edges().iter().enumerate() {
            if id != e0 {
                pairs.push((e.u, e.v));
                origin.push(Origin::Kept(id));
            }
        }
        let v1p = n;
        n_prime = n + 1;
        for _ in 0..d + 1 - deg {
            pairs.push((v1, v1p));
            origin.push(Origin::Split);
        }
        pairs.push((v1p, u));
        origin.push(Origin::Link);
        for _ in 0..(deg - 2) / 2 {
            pairs.push((v1p, v1p));
            origin.push(Origin::NewLoop);
        }
    }
    let corrected = Multigraph::new(n_prime, &pairs)?;
    let (with_v, without_v) = typeii_edges(&corrected, v, d)?;
    let project = |ids: Vec<usize>| -> Result<Vec<usize>> {
        let sub = Degree2Subgraph::from_edge_ids(&corrected, &ids)?;
        let mut out = Vec::new();
        for c in &sub.components {
            let kinds: Vec<Origin> = c.edges.iter().map(|dir| origin[dir.edge]).collect();
            let splits = kinds.iter().filter(|k| **k == Origin::Split).count();
            if kinds.contains(&Origin::NewLoop) || splits >= 2 {
                continue;
            }
            for k in kinds {
                match k {
                    Origin::Kept(id) => out.push(id),
                    Origin::Link => out.push(removed.expect("link edges exist only after a split")),
                    Origin::Split | Origin::NewLoop => {}
                }
            }
        }
        Ok(out)
    };
    Ok((project(with_v)?, project(without_v)?))
}

/// Only `v` is deficient: a 2-factor of `g`, and per-block 2-factors of `g ∖ v`.
fn typeii_base(g: &Multigraph, v: usize, d: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let with_v = two_factor_with_deficit(g, d)?.edge_ids();
    let rest = g.delete_vertices(VertexSet::singleton(v));
    let blocks = bridge_block_decomposition(&rest.graph);
    let mut without_v = Vec::new();
    for block in &blocks.blocks {
        let b = rest.graph.induced_subgraph(*block);
        for e in two_factor_with_deficit(&b.graph, d)?.edge_ids() {
            without_v.push(rest.edge_map[b.edge_map[e]]);
        }
    }
    Ok((with_v, without_v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{rat, ratio};

    fn c4() -> Multigraph {
        Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])
    }

    fn k4() -> Multigraph {
        Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn lieb() -> Multigraph {
        Multigraph::from_edges(3, &[(0, 1), (0, 1), (0, 2), (0, 2)])
    }

    #[test]
    fn matching_counts() {
        assert_eq!(
            enumerate_matchings(&Multigraph::from_edges(2, &[(0, 1)])).count(),
            2
        );
        let all: Vec<_> = enumerate_matchings(&c4()).map(|m| m.edge_ids).collect();
        assert_eq!(
            all,
            vec![
                vec![],
                vec![0],
                vec![0, 2],
                vec![1],
                vec![1, 3],
                vec![2],
                vec![3]
            ]
        );
        assert_eq!(
            enumerate_matchings(&Multigraph::from_edges(1, &[(0, 0), (0, 0)])).count(),
            1
        );
    }

    #[test]
    fn matching_polynomial_examples() {
        let edge = Multigraph::from_edges(2, &[(0, 1)]);
        let w = SchrodingerWeights::new(
            vec![GaussianRational::from_ints(1, 2)],
            vec![rat(3), ratio(-1, 2)],
        )
        .unwrap();
        // (x − 3)(x + 1/2) − 5
        let expected = RationalPolynomial::new(vec![ratio(-13, 2), ratio(-5, 2), rat(1)]);
        assert_eq!(matching_poly_enum(&edge, &w), expected);
        assert_eq!(matching_poly(&edge, &w), expected);

        let adj = |g: &Multigraph| SchrodingerWeights::adjacency(g);
        let c4 = c4();
        assert_eq!(
            matching_poly_enum(&c4, &adj(&c4)),
            RationalPolynomial::from_ints(&[2, 0, -4, 0, 1])
        );
        let k13 = Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(
            matching_poly(&k13, &adj(&k13)),
            RationalPolynomial::from_ints(&[0, 0, -3, 0, 1])
        );
        let p3 = Multigraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(
            matching_poly(&p3, &adj(&p3)),
            RationalPolynomial::from_ints(&[0, -2, 0, 1])
        );
        let lieb = lieb();
        assert_eq!(
            matching_poly(&lieb, &adj(&lieb)),
            RationalPolynomial::from_ints(&[0, -4, 0, 1])
        );
        let empty = Multigraph::from_edges(0, &[]);
        assert!(matching_poly(&empty, &adj(&empty)).is_one());
        assert!(verify_recursion_identity(&lieb, &adj(&lieb)));
    }

    #[test]
    fn degree2_counts() {
        assert_eq!(enumerate_degree2_subgraphs(&k4()).len(), 8);
        let lieb_gammas = enumerate_degree2_subgraphs(&lieb());
        assert_eq!(lieb_gammas.len(), 3);
        assert!(lieb_gammas[0].is_empty());
        assert_eq!(lieb_gammas[1].edge_ids(), vec![0, 1]);
        assert_eq!(
            enumerate_degree2_subgraphs(&Multigraph::from_edges(1, &[(0, 0), (0, 0)])).len(),
            3
        );
    }

    #[test]
    fn cycles_are_canonical() {
        let g = Multigraph::from_edges(3, &[(1, 0), (1, 2), (2, 0)]);
        let cycles = enumerate_cycles(&g);
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].edges[0], DirectedEdge::new(0, false));
        let rebuilt = Degree2Subgraph::from_edge_ids(&g, &[2, 1, 0]).unwrap();
        assert_eq!(rebuilt.components[0], cycles[0]);
    }

    #[test]
    fn orientation_weights() {
        let digon = Multigraph::from_edges(2, &[(0, 1), (0, 1)]);
        let (w1, w2) = (
            GaussianRational::from_ints(1, 1),
            GaussianRational::from_ints(2, -1),
        );
        let w =
            SchrodingerWeights::new(vec![w1.clone(), w2.clone()], vec![rat(0), rat(0)]).unwrap();
        let gamma = &enumerate_degree2_subgraphs(&digon)[1];
        let got: Vec<_> = orientations(gamma, &w)
            .into_iter()
            .map(|(_, x)| x)
            .collect();
        assert_eq!(got, vec![&w1 * &w2.conj(), &w2 * &w1.conj()]);

        let looped = Multigraph::from_edges(1, &[(0, 0)]);
        let w = SchrodingerWeights::new(vec![w1.clone()], vec![rat(0)]).unwrap();
        let gamma = &enumerate_degree2_subgraphs(&looped)[1];
        let got: Vec<_> = orientations(gamma, &w)
            .into_iter()
            .map(|(_, x)| x)
            .collect();
        assert_eq!(got, vec![w1.clone(), w1.conj()]);
        assert_eq!(orientations(&Degree2Subgraph::empty(), &w).len(), 1);
    }

    #[test]
    fn perfect_matchings() {
        assert_eq!(
            enumerate_perfect_matchings(&Multigraph::from_edges(2, &[(0, 1)])).count(),
            1
        );
        assert_eq!(enumerate_perfect_matchings(&c4()).count(), 2);
        assert_eq!(
            enumerate_perfect_matchings(&Multigraph::from_edges(3, &[(0, 1), (1, 2)])).count(),
            0
        );
        assert_eq!(
            enumerate_perfect_matchings(&Multigraph::from_edges(0, &[])).count(),
            1
        );
    }

    #[test]
    fn two_factors() {
        let f = find_2factor(&k4()).unwrap();
        assert_eq!(f.covered, VertexSet::full(4));
        let k5_edges: Vec<_> = (0..5)
            .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
            .collect();
        let k5 = Multigraph::from_edges(5, &k5_edges);
        assert_eq!(find_2factor(&k5).unwrap().covered, VertexSet::full(5));
        assert!(find_2factor(&Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)])).is_none());

        let c5 = Multigraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(matches!(
            two_factor_with_deficit(&c5, 3),
            Err(Error::Precondition(_))
        ));
        assert_eq!(
            two_factor_with_deficit(&k4(), 3).unwrap().covered,
            VertexSet::full(4)
        );
        let k4_minus = Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        let f = two_factor_with_deficit(&k4_minus, 3).unwrap();
        assert_eq!(f.covered, VertexSet::full(4));
        assert_eq!(f.components[0].kind(), CycleKind::Polygon);
    }

    #[test]
    fn typeii_pair_examples() {
        // K4 minus the edge 2–3; vertices 0,1 keep degree 3.
        let g = Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        let (with_v, without_v) = typeII_degree2_pair(&g, 2, 3).unwrap();
        let full_degree = VertexSet::from_iter([0, 1]);
        assert!(with_v.covered.contains(2) && full_degree.is_subset(with_v.covered));
        assert!(!without_v.covered.contains(2) && full_degree.is_subset(without_v.covered));
        for gamma in [&with_v, &without_v] {
            assert_eq!(
                &Degree2Subgraph::from_edge_ids(&g, &gamma.edge_ids()).unwrap(),
                gamma
            );
        }

        let theta = Multigraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]);
        assert!(matches!(
            typeII_degree2_pair(&theta, 0, 3),
            Err(Error::Precondition(_))
        ));
    }
}
