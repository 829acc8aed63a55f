use std::collections::VecDeque;

use super::{BipartiteGraph, Vertex};

/// Breadth-first spanning forest. Each component is rooted at its smallest
/// vertex, which is its lowest-index visible vertex when it has one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningForest {
    /// Vertices in discovery order; each parent precedes its children.
    pub order: Vec<Vertex>,
    /// Parent per vertex slot, `None` for roots.
    pub parent: Vec<Option<Vertex>>,
    pub depth: Vec<usize>,
    pub roots: Vec<Vertex>,
    /// Indices of tree edges in the graph's edge list, ascending.
    pub tree_edges: Vec<usize>,
}

impl SpanningForest {
    pub fn new(graph: &BipartiteGraph) -> Self {
        let n = graph.n_vertices();
        let mut seen = vec![false; n];
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut roots = Vec::new();
        let mut tree_edges = Vec::new();

        for root in graph.vertices() {
            if seen[graph.vertex_slot(root)] {
                continue;
            }
            roots.push(root);
            seen[graph.vertex_slot(root)] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                order.push(x);
                for y in graph.neighbors(x) {
                    let slot = graph.vertex_slot(y);
                    if !seen[slot] {
                        seen[slot] = true;
                        parent[slot] = Some(x);
                        depth[slot] = depth[graph.vertex_slot(x)] + 1;
                        tree_edges.push(graph.edge_between(x, y).expect("neighbours share an edge"));
                        queue.push_back(y);
                    }
                }
            }
        }
        tree_edges.sort_unstable();
        Self { order, parent, depth, roots, tree_edges }
    }

    pub fn is_tree_edge(&self, edge: usize) -> bool {
        self.tree_edges.binary_search(&edge).is_ok()
    }

    pub fn component_count(&self) -> usize {
        self.roots.len()
    }
}
