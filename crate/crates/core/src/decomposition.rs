//! Bridges, bridge-blocks and the bridge-block forest.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::graph::{Multigraph, VertexSet};

/// Bridges of `g` by edge id.
///
/// Lowlink DFS that skips only the *edge id* it arrived through, so a parallel
/// copy of that edge counts as a back edge. Self-loops are never bridges.
pub fn find_bridges(g: &Multigraph) -> BTreeSet<usize> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut bridges = BTreeSet::new();
    let mut clock = 0;

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = clock;
        low[root] = clock;
        clock += 1;
        // (vertex, edge id used to enter, next adjacency index)
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        while let Some(&mut (v, parent_edge, ref mut next)) = stack.last_mut() {
            let adj = g.adjacency(v);
            if *next < adj.len() {
                let d = adj[*next];
                *next += 1;
                if Some(d.edge) == parent_edge || g.edge(d.edge).is_loop() {
                    continue;
                }
                let t = g.terminus(d);
                if disc[t] == usize::MAX {
                    disc[t] = clock;
                    low[t] = clock;
                    clock += 1;
                    stack.push((t, Some(d.edge), 0));
                } else {
                    low[v] = low[v].min(disc[t]);
                }
            } else {
                stack.pop();
                if let (Some(e), Some(&(p, _, _))) = (parent_edge, stack.last()) {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        bridges.insert(e);
                    }
                }
            }
        }
    }
    bridges
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeBlockDecomposition {
    pub bridges: BTreeSet<usize>,
    /// Partition of the vertices, ordered by smallest vertex.
    pub blocks: Vec<VertexSet>,
    /// `block_of[v]` indexes `blocks`.
    pub block_of: Vec<usize>,
    /// One `(block, block, bridge id)` per bridge, smaller block index first.
    pub tree_edges: Vec<(usize, usize, usize)>,
    /// Blocks of degree 1 in the block forest.
    pub leaf_blocks: Vec<usize>,
    /// Vertices of degree 1 in `g`.
    pub leaf_set: VertexSet,
}

impl BridgeBlockDecomposition {
    pub fn tree_degree(&self, block: usize) -> usize {
        self.tree_edges
            .iter()
            .filter(|(a, b, _)| *a == block || *b == block)
            .count()
    }

    pub fn to_value(&self) -> Value {
        json!({
            "bridges": self.bridges.iter().collect::<Vec<_>>(),
            "blocks": self.blocks.iter().map(|b| b.to_vec()).collect::<Vec<_>>(),
            "tree_edges": self.tree_edges.iter().map(|&(a, b, e)| vec![a, b, e]).collect::<Vec<_>>(),
            "leaf_blocks": self.leaf_blocks,
            "leaf_set": self.leaf_set.to_vec(),
        })
    }
}

pub fn bridge_block_decomposition(g: &Multigraph) -> BridgeBlockDecomposition {
    let n = g.vertex_count();
    let bridges = find_bridges(g);
    let mut block_of = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if block_of[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut set = VertexSet::singleton(start);
        block_of[start] = id;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for d in g.adjacency(x) {
                if bridges.contains(&d.edge) {
                    continue;
                }
                let t = g.terminus(*d);
                if block_of[t] == usize::MAX {
                    block_of[t] = id;
                    set = set.with(t);
                    stack.push(t);
                }
            }
        }
        blocks.push(set);
    }
    let tree_edges: Vec<_> = bridges
        .iter()
        .map(|&e| {
            let edge = g.edge(e);
            let (a, b) = (block_of[edge.u], block_of[edge.v]);
            (a.min(b), a.max(b), e)
        })
        .collect();
    let mut decomposition = BridgeBlockDecomposition {
        bridges,
        blocks,
        block_of,
        tree_edges,
        leaf_blocks: Vec::new(),
        leaf_set: VertexSet::from_iter((0..n).filter(|&v| g.degree(v) == 1)),
    };
    decomposition.leaf_blocks = (0..decomposition.blocks.len())
        .filter(|&b| decomposition.tree_degree(b) == 1)
        .collect();
    decomposition
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockType {
    /// Maximum induced degree below `d`.
    TypeI,
    /// Maximum induced degree exactly `d` (blocks are bridge-less).
    TypeII,
    Neither,
}

/// Classifies `g[block]` for odd `d`; degrees are measured inside the block.
pub fn classify_block(g: &Multigraph, block: VertexSet, d: usize) -> BlockType {
    let max = block
        .iter()
        .map(|v| g.degree_within(v, block))
        .max()
        .unwrap_or(0);
    match max.cmp(&d) {
        std::cmp::Ordering::Less => BlockType::TypeI,
        std::cmp::Ordering::Equal => BlockType::TypeII,
        std::cmp::Ordering::Greater => BlockType::Neither,
    }
}
