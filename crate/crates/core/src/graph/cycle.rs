use super::{BipartiteGraph, Vertex};
use crate::error::{Error, Result};

/// One step of a closed walk. `forward` is true when the step runs along the
/// stored visible → hidden orientation of its edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub from: Vertex,
    pub to: Vertex,
    pub forward: bool,
}

/// A simple closed alternating walk, stored as its vertex sequence without
/// repeating the basepoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    vertices: Vec<Vertex>,
}

impl Cycle {
    /// Validates closure, alternation, simplicity and edge membership.
    pub fn new(graph: &BipartiteGraph, vertices: Vec<Vertex>) -> Result<Self> {
        let cycle = Self { vertices };
        cycle.validate(graph)?;
        Ok(cycle)
    }

    pub(crate) fn from_vertices_unchecked(vertices: Vec<Vertex>) -> Self {
        Self { vertices }
    }

    pub fn validate(&self, graph: &BipartiteGraph) -> Result<()> {
        let k = self.vertices.len();
        if k < 4 || !k.is_multiple_of(2) {
            return Err(Error::InvalidCycle(format!("length {k} is not an even number >= 4")));
        }
        for (i, &x) in self.vertices.iter().enumerate() {
            if !graph.contains(x) {
                return Err(Error::IndexOutOfRange(format!("vertex {x}")));
            }
            if self.vertices[..i].contains(&x) {
                return Err(Error::InvalidCycle(format!("vertex {x} repeats")));
            }
        }
        for step in self.steps() {
            if step.from.is_visible() == step.to.is_visible() {
                return Err(Error::InvalidCycle(format!("{} -> {} does not alternate", step.from, step.to)));
            }
            if graph.edge_between(step.from, step.to).is_none() {
                return Err(Error::NoSuchEdge(step.from, step.to));
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Number of steps `k`.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn basepoint(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn steps(&self) -> impl Iterator<Item = Step> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| {
            let from = self.vertices[i];
            let to = self.vertices[(i + 1) % k];
            Step { from, to, forward: from.is_visible() }
        })
    }

    /// Same subgraph traversed the other way, from the same basepoint.
    pub fn reversed(&self) -> Self {
        let mut vertices = Vec::with_capacity(self.vertices.len());
        vertices.push(self.vertices[0]);
        vertices.extend(self.vertices[1..].iter().rev());
        Self { vertices }
    }

    /// Same traversal started `shift` steps later.
    pub fn rotated(&self, shift: usize) -> Self {
        let mut vertices = self.vertices.clone();
        let k = vertices.len();
        vertices.rotate_left(shift % k);
        Self { vertices }
    }

    /// Starts at the smallest vertex (always visible) and heads to the
    /// smaller of its two cycle neighbours.
    pub fn canonical(&self) -> Self {
        let k = self.vertices.len();
        let start = (0..k).min_by_key(|&i| self.vertices[i]).expect("non-empty cycle");
        let rotated = self.rotated(start);
        if rotated.vertices[1] <= rotated.vertices[k - 1] {
            rotated
        } else {
            rotated.reversed()
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    pub fn label(&self) -> String {
        let mut s: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        s.push(self.vertices[0].to_string());
        s.join("-")
    }
}
