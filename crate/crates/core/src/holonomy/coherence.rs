use serde::{Deserialize, Serialize};

use super::{deviation, Weighting};
use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Edge, SpanningForest, Vertex};
use crate::group::{GroupContext, GroupElement, MetricKind};

/// A group element per vertex, `s: V ∪ H → G`.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    ctx: GroupContext,
    n_visible: usize,
    values: Vec<GroupElement>,
}

impl Section {
    pub fn new(ctx: GroupContext, visible: Vec<GroupElement>, hidden: Vec<GroupElement>) -> Result<Self> {
        for g in visible.iter().chain(&hidden) {
            ctx.ensure_same(g.ctx())?;
        }
        let n_visible = visible.len();
        let mut values = visible;
        values.extend(hidden);
        Ok(Self { ctx, n_visible, values })
    }

    pub fn identity(ctx: GroupContext, graph: &BipartiteGraph) -> Self {
        Self { ctx, n_visible: graph.n_visible(), values: vec![ctx.identity(); graph.n_vertices()] }
    }

    /// Section with `f` evaluated at every vertex, visible first.
    pub fn from_fn(
        ctx: GroupContext,
        graph: &BipartiteGraph,
        mut f: impl FnMut(Vertex) -> Result<GroupElement>,
    ) -> Result<Self> {
        let values = graph.vertices().map(&mut f).collect::<Result<Vec<_>>>()?;
        for g in &values {
            ctx.ensure_same(g.ctx())?;
        }
        Ok(Self { ctx, n_visible: graph.n_visible(), values })
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn get(&self, x: Vertex) -> &GroupElement {
        match x {
            Vertex::Visible(v) => &self.values[v],
            Vertex::Hidden(h) => &self.values[self.n_visible + h],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(vertex, value)` pairs, visible first.
    pub fn iter(&self) -> impl Iterator<Item = (Vertex, &GroupElement)> {
        self.values.iter().enumerate().map(|(i, g)| {
            let x = if i < self.n_visible { Vertex::Visible(i) } else { Vertex::Hidden(i - self.n_visible) };
            (x, g)
        })
    }

    fn covers(&self, graph: &BipartiteGraph) -> bool {
        self.n_visible == graph.n_visible() && self.values.len() == graph.n_vertices()
    }
}

/// First non-tree edge whose weight disagrees with the gauge-fixed section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceViolation {
    pub edge: Edge,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coherence {
    Coherent { section: Section, max_residual: f64 },
    Violation(CoherenceViolation),
}

impl Coherence {
    pub fn is_coherent(&self) -> bool {
        matches!(self, Coherence::Coherent { .. })
    }
}

impl Weighting {
    /// Gauge-fixes on the breadth-first spanning forest (identity at each
    /// root) and checks every remaining edge against the propagated section
    /// under the context's default metric.
    pub fn find_section(&self, tol: f64) -> Result<Coherence> {
        let graph = self.graph();
        let forest = SpanningForest::new(graph);
        let mut values: Vec<Option<GroupElement>> = vec![None; graph.n_vertices()];
        for &x in &forest.order {
            let slot = graph.vertex_slot(x);
            let value = match forest.parent[slot] {
                None => self.ctx().identity(),
                Some(p) => {
                    let from = values[graph.vertex_slot(p)].as_ref().expect("parents come first");
                    self.step_value(p, x)?.multiply(from)?
                }
            };
            values[slot] = Some(value);
        }
        let values: Vec<GroupElement> = values.into_iter().map(|v| v.expect("forest spans the graph")).collect();
        let section = Section { ctx: *self.ctx(), n_visible: graph.n_visible(), values };

        let metric = MetricKind::default_for(self.ctx().kind());
        let mut max_residual: f64 = 0.0;
        for (idx, &(v, h)) in graph.edges().iter().enumerate() {
            if forest.is_tree_edge(idx) {
                continue;
            }
            let expected = section.get(Vertex::Hidden(h)).multiply(&section.get(Vertex::Visible(v)).inverse()?)?;
            // d(w, s(j) s(i)⁻¹) as the deviation of the relative element from e.
            let relative = expected.inverse()?.multiply(&self.weights()[idx])?;
            let residual = match metric {
                m if m.is_log_based() => deviation(&relative, m)?.iota,
                m => self.weights()[idx].distance(&expected, m)?,
            };
            if residual >= tol {
                return Ok(Coherence::Violation(CoherenceViolation { edge: (v, h), residual }));
            }
            max_residual = max_residual.max(residual);
        }
        Ok(Coherence::Coherent { section, max_residual })
    }

    /// `w'_ij = g(j) w_ij g(i)⁻¹`.
    pub fn gauge_transform(&self, gauge: &Section) -> Result<Weighting> {
        self.ctx().ensure_same(gauge.ctx())?;
        if !gauge.covers(self.graph()) {
            return Err(Error::WeightingShape("gauge section does not cover the graph".into()));
        }
        let mut out = self.clone();
        let edges = self.graph().edges().to_vec();
        for (w, (v, h)) in out.weights_mut().iter_mut().zip(edges) {
            *w = gauge.get(Vertex::Hidden(h)).multiply(w)?.multiply(&gauge.get(Vertex::Visible(v)).inverse()?)?;
        }
        Ok(out)
    }
}
