//! Holonomies along cycles and the contextuality indices built from them.
//!
//! Steps are composed in function-composition order: for a walk
//! `x0 → x1 → … → x0` the holonomy is `g_{k-1} ⋯ g_1 g_0`, where `g_i` is the
//! value of step `i`. With coherent weights `w_ij = s(j) s(i)⁻¹` each step
//! value is `s(to) s(from)⁻¹` and the product telescopes to the identity.

mod berry;
mod coherence;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Cycle, CycleFamily, Edge, FamilyPolicy, Vertex};
use crate::group::{GroupContext, GroupElement, MetricKind};

pub use berry::{trace_phase, BerrySummary};
pub use coherence::{Coherence, CoherenceViolation, Section};

/// A group element on every edge of a bipartite graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Weighting {
    graph: BipartiteGraph,
    ctx: GroupContext,
    weights: Vec<GroupElement>,
}

/// Contextuality of one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleIndex {
    pub iota: f64,
    /// Set when a log-based metric had no principal logarithm and the
    /// Frobenius distance was used instead.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleEntry {
    pub id: usize,
    pub cycle: String,
    pub iota: f64,
    pub flat: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fallback: bool,
}

/// Per-cycle indices and their mean `κ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextReport {
    /// Absent for a loop given directly by its factors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyPolicy>,
    pub both_orientations: bool,
    pub metric: MetricKind,
    pub flat_tol: f64,
    pub per_cycle: Vec<CycleEntry>,
    pub kappa: f64,
    pub flat: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub berry: Option<BerrySummary>,
}

/// `‖·‖` variants for the quantum index `ι_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantumVariant {
    OperatorNorm,
    TraceDistance,
}

impl From<QuantumVariant> for MetricKind {
    fn from(v: QuantumVariant) -> Self {
        match v {
            QuantumVariant::OperatorNorm => MetricKind::OperatorNorm,
            QuantumVariant::TraceDistance => MetricKind::TraceDistance,
        }
    }
}

/// Distance from `h` to the identity, falling back to Frobenius when a
/// log-based metric has no principal logarithm.
pub fn deviation(h: &GroupElement, metric: MetricKind) -> Result<CycleIndex> {
    let id = h.ctx().identity();
    match h.distance(&id, metric) {
        Ok(iota) => Ok(CycleIndex { iota, fallback: false }),
        Err(Error::NoPrincipalLog(_)) if metric.is_log_based() => {
            Ok(CycleIndex { iota: h.distance(&id, MetricKind::Frobenius)?, fallback: true })
        }
        Err(e) => Err(e),
    }
}

/// Product of `factors` in the order given, `f0 · f1 ⋯ f_{k-1}`.
pub fn ordered_product(ctx: &GroupContext, factors: &[GroupElement]) -> Result<GroupElement> {
    factors.iter().try_fold(ctx.identity(), |acc, f| acc.multiply(f))
}

/// Report for a single loop whose holonomy is the ordered product of `factors`.
pub fn loop_report(
    ctx: &GroupContext,
    labels: &[String],
    factors: &[GroupElement],
    metric: MetricKind,
    flat_tol: f64,
) -> Result<ContextReport> {
    metric.validate_for(ctx)?;
    let ix = deviation(&ordered_product(ctx, factors)?, metric)?;
    let flat = ix.iota < flat_tol;
    Ok(ContextReport {
        family: None,
        both_orientations: false,
        metric,
        flat_tol,
        per_cycle: vec![CycleEntry { id: 0, cycle: labels.join("*"), iota: ix.iota, flat, fallback: ix.fallback }],
        kappa: ix.iota,
        flat,
        berry: None,
    })
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    values.sum::<f64>() / n as f64
}

impl Weighting {
    pub fn new(graph: BipartiteGraph, ctx: GroupContext, weights: Vec<GroupElement>) -> Result<Self> {
        if weights.len() != graph.edges().len() {
            return Err(Error::WeightingShape(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.edges().len()
            )));
        }
        for w in &weights {
            ctx.ensure_same(w.ctx())?;
        }
        Ok(Self { graph, ctx, weights })
    }

    /// Weight per edge from a callback, in edge order.
    pub fn from_fn(
        graph: BipartiteGraph,
        ctx: GroupContext,
        mut f: impl FnMut(usize, Edge) -> Result<GroupElement>,
    ) -> Result<Self> {
        let weights = graph.edges().iter().enumerate().map(|(i, &e)| f(i, e)).collect::<Result<Vec<_>>>()?;
        Self::new(graph, ctx, weights)
    }

    /// `w_ij = s(j) s(i)⁻¹`.
    pub fn from_section(graph: BipartiteGraph, section: &Section) -> Result<Self> {
        let ctx = *section.ctx();
        Self::from_fn(graph, ctx, |_, (v, h)| {
            section.get(Vertex::Hidden(h)).multiply(&section.get(Vertex::Visible(v)).inverse()?)
        })
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn weights(&self) -> &[GroupElement] {
        &self.weights
    }

    pub fn weight(&self, v: usize, h: usize) -> Option<&GroupElement> {
        self.graph.edge_index(v, h).map(|i| &self.weights[i])
    }

    /// Copy with the weight on `(v, h)` replaced.
    pub fn with_weight(&self, v: usize, h: usize, value: GroupElement) -> Result<Self> {
        self.ctx.ensure_same(value.ctx())?;
        let idx = self
            .graph
            .edge_index(v, h)
            .ok_or(Error::NoSuchEdge(Vertex::Visible(v), Vertex::Hidden(h)))?;
        let mut out = self.clone();
        out.weights[idx] = value;
        Ok(out)
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [GroupElement] {
        &mut self.weights
    }

    /// Stored weight for a visible → hidden step, its inverse for the reverse step.
    pub fn step_value(&self, from: Vertex, to: Vertex) -> Result<GroupElement> {
        let idx = self.graph.edge_between(from, to).ok_or(Error::NoSuchEdge(from, to))?;
        let w = &self.weights[idx];
        if from.is_visible() {
            Ok(w.clone())
        } else {
            w.inverse()
        }
    }

    pub fn holonomy(&self, cycle: &Cycle) -> Result<GroupElement> {
        cycle
            .steps()
            .try_fold(self.ctx.identity(), |acc, step| self.step_value(step.from, step.to)?.multiply(&acc))
    }

    /// `ι(C) = d(Hol(C), e)`.
    pub fn cycle_contextuality(&self, cycle: &Cycle, metric: MetricKind) -> Result<CycleIndex> {
        metric.validate_for(&self.ctx)?;
        deviation(&self.holonomy(cycle)?, metric)
    }

    /// `ι_q(C)` under the operator norm or the trace distance.
    pub fn quantum_contextuality(&self, cycle: &Cycle, variant: QuantumVariant) -> Result<f64> {
        Ok(self.cycle_contextuality(cycle, variant.into())?.iota)
    }

    /// `κ`: the mean of `ι` over `family`. Cycles are evaluated in parallel
    /// and reported in family order.
    pub fn contextuality_index(&self, family: &CycleFamily, metric: MetricKind, flat_tol: f64) -> Result<ContextReport> {
        if family.is_empty() {
            return Err(Error::EmptyFamily);
        }
        metric.validate_for(&self.ctx)?;
        let indices = family
            .cycles
            .par_iter()
            .map(|c| self.cycle_contextuality(c, metric))
            .collect::<Result<Vec<_>>>()?;
        let per_cycle: Vec<CycleEntry> = family
            .cycles
            .iter()
            .zip(&indices)
            .enumerate()
            .map(|(id, (c, ix))| CycleEntry {
                id,
                cycle: c.label(),
                iota: ix.iota,
                flat: ix.iota < flat_tol,
                fallback: ix.fallback,
            })
            .collect();
        let kappa = mean(indices.iter().map(|ix| ix.iota));
        Ok(ContextReport {
            family: Some(family.policy),
            both_orientations: family.both_orientations,
            metric,
            flat_tol,
            flat: per_cycle.iter().all(|e| e.flat),
            per_cycle,
            kappa,
            berry: None,
        })
    }
}
