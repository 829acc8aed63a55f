//! Bipartite graphs and the cycle families that holonomies are taken over.

mod cycle;
mod enumerate;
mod forest;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use cycle::{Cycle, Step};
pub use enumerate::{enumerate_four_cycles, enumerate_simple_cycles, fundamental_cycle_basis, DEFAULT_CYCLE_CAP};
pub use forest::SpanningForest;

/// A unit of the network. Visible units order before hidden units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Visible(usize),
    Hidden(usize),
}

impl Vertex {
    pub fn is_visible(self) -> bool {
        matches!(self, Vertex::Visible(_))
    }

    pub fn index(self) -> usize {
        match self {
            Vertex::Visible(i) | Vertex::Hidden(i) => i,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Visible(i) => write!(f, "v{i}"),
            Vertex::Hidden(i) => write!(f, "h{i}"),
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad vertex label `{s}` (expected v<i> or h<i>)"));
        let (tag, rest) = s.split_at_checked(1).ok_or_else(bad)?;
        let index: usize = rest.parse().map_err(|_| bad())?;
        match tag {
            "v" => Ok(Vertex::Visible(index)),
            "h" => Ok(Vertex::Hidden(index)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// An edge, stored visible-first.
pub type Edge = (usize, usize);

/// `G = (V, H, E)` with `E ⊆ V × H`, edges sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_visible: usize,
    n_hidden: usize,
    edges: Vec<Edge>,
    visible_adj: Vec<Vec<usize>>,
    hidden_adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Builds a graph, rejecting duplicate edges.
    pub fn new(n_visible: usize, n_hidden: usize, edges: &[Edge]) -> Result<Self> {
        Self::build(n_visible, n_hidden, edges, false)
    }

    /// Like [`BipartiteGraph::new`] but silently drops repeated edges.
    pub fn new_dedup(n_visible: usize, n_hidden: usize, edges: &[Edge]) -> Result<Self> {
        Self::build(n_visible, n_hidden, edges, true)
    }

    pub fn complete(n_visible: usize, n_hidden: usize) -> Self {
        let edges: Vec<Edge> = (0..n_visible).flat_map(|v| (0..n_hidden).map(move |h| (v, h))).collect();
        Self::build(n_visible, n_hidden, &edges, false).expect("complete graph edges are valid")
    }

    fn build(n_visible: usize, n_hidden: usize, edges: &[Edge], dedup: bool) -> Result<Self> {
        let mut sorted = Vec::with_capacity(edges.len());
        for &(v, h) in edges {
            if v >= n_visible || h >= n_hidden {
                return Err(Error::IndexOutOfRange(format!(
                    "edge ({v}, {h}) in a {n_visible}x{n_hidden} graph"
                )));
            }
            sorted.push((v, h));
        }
        sorted.sort_unstable();
        let before = sorted.len();
        sorted.dedup();
        if sorted.len() != before && !dedup {
            let dup = edges
                .iter()
                .enumerate()
                .find(|(i, e)| edges[..*i].contains(e))
                .map(|(_, e)| *e)
                .expect("a duplicate exists");
            return Err(Error::DuplicateEdge(dup.0, dup.1));
        }
        let mut visible_adj = vec![Vec::new(); n_visible];
        let mut hidden_adj = vec![Vec::new(); n_hidden];
        for &(v, h) in &sorted {
            visible_adj[v].push(h);
            hidden_adj[h].push(v);
        }
        Ok(Self { n_visible, n_hidden, edges: sorted, visible_adj, hidden_adj })
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn n_vertices(&self) -> usize {
        self.n_visible + self.n_hidden
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Position of an edge in the canonical edge list.
    pub fn edge_index(&self, v: usize, h: usize) -> Option<usize> {
        self.edges.binary_search(&(v, h)).ok()
    }

    /// Edge joining two vertices, in either order.
    pub fn edge_between(&self, a: Vertex, b: Vertex) -> Option<usize> {
        match (a, b) {
            (Vertex::Visible(v), Vertex::Hidden(h)) | (Vertex::Hidden(h), Vertex::Visible(v)) => self.edge_index(v, h),
            _ => None,
        }
    }

    /// Neighbours in ascending order.
    pub fn neighbors(&self, x: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let (list, wrap): (&[usize], fn(usize) -> Vertex) = match x {
            Vertex::Visible(v) => (&self.visible_adj[v], Vertex::Hidden),
            Vertex::Hidden(h) => (&self.hidden_adj[h], Vertex::Visible),
        };
        list.iter().map(move |&i| wrap(i))
    }

    pub fn contains(&self, x: Vertex) -> bool {
        match x {
            Vertex::Visible(v) => v < self.n_visible,
            Vertex::Hidden(h) => h < self.n_hidden,
        }
    }

    /// All vertices, visible first.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        (0..self.n_visible).map(Vertex::Visible).chain((0..self.n_hidden).map(Vertex::Hidden))
    }

    /// Dense index: visible `i` maps to `i`, hidden `j` to `n_visible + j`.
    pub fn vertex_slot(&self, x: Vertex) -> usize {
        match x {
            Vertex::Visible(v) => v,
            Vertex::Hidden(h) => self.n_visible + h,
        }
    }
}

/// How a cycle family is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyPolicy {
    FourCycles,
    SimpleCycles { max_len: usize },
    FundamentalBasis,
}

impl fmt::Display for FamilyPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyPolicy::FourCycles => f.write_str("four-cycles"),
            FamilyPolicy::SimpleCycles { max_len } => write!(f, "simple-cycles:{max_len}"),
            FamilyPolicy::FundamentalBasis => f.write_str("fundamental-basis"),
        }
    }
}

impl FromStr for FamilyPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(len) = lower.strip_prefix("simple-cycles:").or_else(|| lower.strip_prefix("simple:")) {
            let max_len = len.parse().map_err(|_| Error::InvalidArgument(format!("bad cycle length `{len}`")))?;
            return Ok(FamilyPolicy::SimpleCycles { max_len });
        }
        match lower.as_str() {
            "four-cycles" | "four" | "4" => Ok(FamilyPolicy::FourCycles),
            "fundamental-basis" | "basis" => Ok(FamilyPolicy::FundamentalBasis),
            other => Err(Error::InvalidArgument(format!("unknown family policy `{other}`"))),
        }
    }
}

impl Serialize for FamilyPolicy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FamilyPolicy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A policy-generated collection of cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleFamily {
    pub policy: FamilyPolicy,
    pub cycles: Vec<Cycle>,
    /// Tree edges (indices into the graph's edge list) for `FundamentalBasis`.
    pub spanning_tree: Option<Vec<usize>>,
    /// Whether each cycle is followed by its reversed traversal.
    pub both_orientations: bool,
}

impl CycleFamily {
    pub fn generate(graph: &BipartiteGraph, policy: FamilyPolicy) -> Result<Self> {
        match policy {
            FamilyPolicy::FourCycles => Ok(enumerate_four_cycles(graph)),
            FamilyPolicy::SimpleCycles { max_len } => enumerate_simple_cycles(graph, max_len, DEFAULT_CYCLE_CAP),
            FamilyPolicy::FundamentalBasis => Ok(fundamental_cycle_basis(graph)),
        }
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Each cycle followed by the same subgraph traversed the other way round.
    pub fn with_both_orientations(mut self) -> Self {
        if self.both_orientations {
            return self;
        }
        self.cycles = self.cycles.iter().flat_map(|c| [c.clone(), c.reversed()]).collect();
        self.both_orientations = true;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_graph_cases() {
        let k22 = BipartiteGraph::new(2, 2, &[(1, 1), (0, 0), (1, 0), (0, 1)]).unwrap();
        assert_eq!(k22.edges(), &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(k22, BipartiteGraph::complete(2, 2));

        let single = BipartiteGraph::new(1, 1, &[(0, 0)]).unwrap();
        assert_eq!(single.edges().len(), 1);
        assert_eq!(BipartiteGraph::complete(3, 3).edges().len(), 9);
    }

    #[test]
    fn build_graph_errors() {
        assert!(matches!(BipartiteGraph::new(1, 1, &[(0, 1)]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(BipartiteGraph::new(2, 2, &[(0, 1), (0, 1)]), Err(Error::DuplicateEdge(0, 1))));
        assert_eq!(BipartiteGraph::new_dedup(2, 2, &[(0, 1), (0, 1)]).unwrap().edges(), &[(0, 1)]);
    }

    #[test]
    fn vertex_labels() {
        assert_eq!(Vertex::Visible(3).to_string(), "v3");
        assert_eq!("h12".parse::<Vertex>().unwrap(), Vertex::Hidden(12));
        assert!("x1".parse::<Vertex>().is_err());
        assert!(Vertex::Visible(9) < Vertex::Hidden(0));
    }

    #[test]
    fn policy_strings() {
        assert_eq!("simple-cycles:6".parse::<FamilyPolicy>().unwrap(), FamilyPolicy::SimpleCycles { max_len: 6 });
        assert_eq!("basis".parse::<FamilyPolicy>().unwrap(), FamilyPolicy::FundamentalBasis);
        let json = serde_json::to_string(&FamilyPolicy::SimpleCycles { max_len: 8 }).unwrap();
        assert_eq!(json, r#""simple-cycles:8""#);
    }
}
