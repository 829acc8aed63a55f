use super::{BipartiteGraph, Cycle, CycleFamily, FamilyPolicy, SpanningForest, Vertex};
use crate::error::{Error, Result};

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// One representative per 4-edge subgraph `{v1, v2} × {h1, h2}`, as
/// `v1 → h1 → v2 → h2` with `v1 < v2`, `h1 < h2`.
pub fn enumerate_four_cycles(graph: &BipartiteGraph) -> CycleFamily {
    let mut cycles = Vec::new();
    for v1 in 0..graph.n_visible() {
        for v2 in v1 + 1..graph.n_visible() {
            let shared: Vec<usize> = graph.visible_adj[v1]
                .iter()
                .copied()
                .filter(|h| graph.visible_adj[v2].binary_search(h).is_ok())
                .collect();
            for (i, &h1) in shared.iter().enumerate() {
                for &h2 in &shared[i + 1..] {
                    cycles.push(Cycle::from_vertices_unchecked(vec![
                        Vertex::Visible(v1),
                        Vertex::Hidden(h1),
                        Vertex::Visible(v2),
                        Vertex::Hidden(h2),
                    ]));
                }
            }
        }
    }
    CycleFamily { policy: FamilyPolicy::FourCycles, cycles, spanning_tree: None, both_orientations: false }
}

struct Search<'a> {
    graph: &'a BipartiteGraph,
    max_len: usize,
    cap: usize,
    path: Vec<Vertex>,
    on_path: Vec<bool>,
    found: Vec<Cycle>,
}

impl Search<'_> {
    fn extend(&mut self, start: usize) -> Result<()> {
        let last = *self.path.last().expect("path starts at the basepoint");
        let neighbours: Vec<Vertex> = self.graph.neighbors(last).collect();
        for next in neighbours {
            if next == Vertex::Visible(start) {
                let k = self.path.len();
                // Keep one orientation: second vertex below the last.
                if k >= 4 && self.path[1] < self.path[k - 1] {
                    if self.found.len() >= self.cap {
                        return Err(Error::ExplosionGuard { cap: self.cap });
                    }
                    self.found.push(Cycle::from_vertices_unchecked(self.path.clone()));
                }
                continue;
            }
            // Visible vertices above the basepoint only, so the basepoint is the cycle minimum.
            if let Vertex::Visible(v) = next {
                if v <= start {
                    continue;
                }
            }
            let slot = self.graph.vertex_slot(next);
            if self.on_path[slot] || self.path.len() >= self.max_len {
                continue;
            }
            self.on_path[slot] = true;
            self.path.push(next);
            self.extend(start)?;
            self.path.pop();
            self.on_path[slot] = false;
        }
        Ok(())
    }
}

/// All simple cycles with `4 <= length <= max_len`, each once in canonical
/// form, ordered by length and then vertex sequence.
pub fn enumerate_simple_cycles(graph: &BipartiteGraph, max_len: usize, cap: usize) -> Result<CycleFamily> {
    if max_len < 4 || !max_len.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("max_len must be an even number >= 4, got {max_len}")));
    }
    let mut search = Search {
        graph,
        max_len,
        cap,
        path: Vec::with_capacity(max_len),
        on_path: vec![false; graph.n_vertices()],
        found: Vec::new(),
    };
    for start in 0..graph.n_visible() {
        let slot = graph.vertex_slot(Vertex::Visible(start));
        search.path.push(Vertex::Visible(start));
        search.on_path[slot] = true;
        search.extend(start)?;
        search.on_path[slot] = false;
        search.path.pop();
    }
    let mut cycles = search.found;
    cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(CycleFamily {
        policy: FamilyPolicy::SimpleCycles { max_len },
        cycles,
        spanning_tree: None,
        both_orientations: false,
    })
}

fn path_to_ancestor(forest: &SpanningForest, graph: &BipartiteGraph, mut x: Vertex, depth: usize) -> Vec<Vertex> {
    let mut path = vec![x];
    while forest.depth[graph.vertex_slot(x)] > depth {
        x = forest.parent[graph.vertex_slot(x)].expect("non-root has a parent");
        path.push(x);
    }
    path
}

/// The cycle closed by each non-tree edge of the breadth-first spanning
/// forest, in edge order.
pub fn fundamental_cycle_basis(graph: &BipartiteGraph) -> CycleFamily {
    let forest = SpanningForest::new(graph);
    let mut cycles = Vec::new();
    for (idx, &(v, h)) in graph.edges().iter().enumerate() {
        if forest.is_tree_edge(idx) {
            continue;
        }
        let (v, h) = (Vertex::Visible(v), Vertex::Hidden(h));
        // Climb both endpoints to the same depth, then together to the meeting point.
        let (dv, dh) = (forest.depth[graph.vertex_slot(v)], forest.depth[graph.vertex_slot(h)]);
        let common = dv.min(dh);
        let mut up_v = path_to_ancestor(&forest, graph, v, common);
        let mut up_h = path_to_ancestor(&forest, graph, h, common);
        while up_v.last() != up_h.last() {
            let (a, b) = (*up_v.last().unwrap(), *up_h.last().unwrap());
            up_v.push(forest.parent[graph.vertex_slot(a)].expect("same component"));
            up_h.push(forest.parent[graph.vertex_slot(b)].expect("same component"));
        }
        // v → h → ... → meet → ... → v
        let mut vertices = vec![v];
        vertices.extend(up_h.iter().copied());
        vertices.extend(up_v[1..up_v.len() - 1].iter().rev().copied());
        cycles.push(Cycle::from_vertices_unchecked(vertices).canonical());
    }
    CycleFamily {
        policy: FamilyPolicy::FundamentalBasis,
        cycles,
        spanning_tree: Some(forest.tree_edges),
        both_orientations: false,
    }
}
