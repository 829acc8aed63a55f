//! Gradient descent on the contextuality index in Lie-algebra coordinates.
//!
//! Each free edge carries `x_e` in the algebra and the weight `exp(x_e)`;
//! frozen edges keep their initial value. The gradient is taken by central
//! differences along orthonormal algebra coordinates, and steps are accepted
//! only if they lower the objective.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CycleFamily, Edge};
use crate::group::algebra::algebra_dim;
use crate::group::{AlgebraElement, GroupKind, MetricKind};
use crate::holonomy::Weighting;

pub const DEFAULT_FD_STEP: f64 = 1e-6;
const GRAD_STOP: f64 = 1e-8;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    #[default]
    Kappa,
    Berry,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa" => Ok(Objective::Kappa),
            "berry" => Ok(Objective::Berry),
            _ => Err(Error::InvalidArgument(format!("unknown objective {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlattenProblem {
    pub initial: Weighting,
    pub family: CycleFamily,
    pub metric: MetricKind,
    pub frozen: BTreeSet<Edge>,
    pub eta: f64,
    pub max_iter: usize,
    pub kappa_stop: f64,
    pub objective: Objective,
}

impl FlattenProblem {
    pub fn new(initial: Weighting, family: CycleFamily, metric: MetricKind) -> Self {
        Self {
            initial,
            family,
            metric,
            frozen: BTreeSet::new(),
            eta: 0.1,
            max_iter: 500,
            kappa_stop: 1e-6,
            objective: Objective::Kappa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ctx = self.initial.ctx();
        if ctx.kind() == GroupKind::Z2 {
            return Err(Error::NonMatrixContext(ctx.kind()));
        }
        self.metric.validate_for(ctx)?;
        if self.family.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidArgument(format!("step size {} must be positive", self.eta)));
        }
        for &(v, h) in &self.frozen {
            if self.initial.graph().edge_index(v, h).is_none() {
                return Err(Error::NoSuchEdge(crate::graph::Vertex::Visible(v), crate::graph::Vertex::Hidden(h)));
            }
        }
        Ok(())
    }

    /// Indices of the edges that are optimized, in edge order.
    pub fn free_edges(&self) -> Vec<usize> {
        let graph = self.initial.graph();
        (0..graph.edges().len()).filter(|&i| !self.frozen.contains(&graph.edges()[i])).collect()
    }

    /// Logarithms of the initial weights on the free edges.
    pub fn initial_params(&self) -> Result<Vec<AlgebraElement>> {
        self.free_edges().into_iter().map(|i| self.initial.weights()[i].log()).collect()
    }

    /// Weighting with `exp(params[k])` on the `k`-th free edge.
    pub fn rebuild(&self, params: &[AlgebraElement]) -> Result<Weighting> {
        let free = self.free_edges();
        if params.len() != free.len() {
            return Err(Error::InvalidArgument(format!("{} parameters for {} free edges", params.len(), free.len())));
        }
        let mut w = self.initial.clone();
        for (&i, x) in free.iter().zip(params) {
            w.weights_mut()[i] = x.exp();
        }
        Ok(w)
    }

    fn evaluate(&self, w: &Weighting) -> Result<f64> {
        match self.objective {
            Objective::Kappa => Ok(w.contextuality_index(&self.family, self.metric, 0.0)?.kappa),
            Objective::Berry => Ok(w.berry_index(&self.family)?.kappa_berry),
        }
    }
}

/// The objective at `exp(params)` on the free edges.
pub fn kappa_objective(params: &[AlgebraElement], prob: &FlattenProblem) -> Result<f64> {
    prob.evaluate(&prob.rebuild(params)?)
}

/// Central differences along every orthonormal coordinate of every free edge,
/// concatenated edge by edge.
pub fn finite_diff_gradient(params: &[AlgebraElement], prob: &FlattenProblem, h: f64) -> Result<Vec<f64>> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidArgument(format!("difference step {h} must be positive")));
    }
    let ctx = *prob.initial.ctx();
    let coords: Vec<Vec<f64>> = params.iter().map(|x| x.coords()).collect();
    let mut grad = Vec::with_capacity(coords.len() * algebra_dim(&ctx)?);
    let mut trial = params.to_vec();
    for (e, base) in coords.iter().enumerate() {
        for k in 0..base.len() {
            let mut shifted = base.clone();
            shifted[k] = base[k] + h;
            trial[e] = AlgebraElement::from_coords(ctx, &shifted)?;
            let plus = kappa_objective(&trial, prob)?;
            shifted[k] = base[k] - h;
            trial[e] = AlgebraElement::from_coords(ctx, &shifted)?;
            let minus = kappa_objective(&trial, prob)?;
            grad.push((plus - minus) / (2.0 * h));
        }
        trial[e] = params[e].clone();
    }
    Ok(grad)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub iter: usize,
    pub kappa: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct FlattenTrace {
    pub iterates: Vec<Iterate>,
    pub weighting: Weighting,
    pub converged: bool,
}

impl FlattenTrace {
    pub fn final_kappa(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |it| it.kappa)
    }

    /// `iter,kappa,grad_norm` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,kappa,grad_norm\n");
        for it in &self.iterates {
            out.push_str(&format!("{},{:e},{:e}\n", it.iter, it.kappa, it.grad_norm));
        }
        out
    }
}

fn step(params: &[AlgebraElement], grad: &[f64], eta: f64) -> Result<Vec<AlgebraElement>> {
    let mut offset = 0;
    params
        .iter()
        .map(|x| {
            let mut c = x.coords();
            for (ci, gi) in c.iter_mut().zip(&grad[offset..]) {
                *ci -= eta * gi;
            }
            offset += c.len();
            AlgebraElement::from_coords(*x.ctx(), &c)
        })
        .collect()
}

/// Backtracking gradient descent. Stops when the objective reaches
/// `kappa_stop`, the gradient vanishes, no step length gives a decrease, or
/// `max_iter` steps have been taken. `converged` is set only in the first case.
pub fn flatten(prob: &FlattenProblem) -> Result<FlattenTrace> {
    prob.validate()?;
    let mut params = prob.initial_params()?;
    let mut kappa = kappa_objective(&params, prob)?;
    let mut iterates = Vec::new();
    let mut eta = prob.eta;

    for iter in 0..=prob.max_iter {
        if kappa <= prob.kappa_stop || params.is_empty() {
            iterates.push(Iterate { iter, kappa, grad_norm: 0.0 });
            break;
        }
        let grad = finite_diff_gradient(&params, prob, DEFAULT_FD_STEP)?;
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        iterates.push(Iterate { iter, kappa, grad_norm });
        if grad_norm < GRAD_STOP || iter == prob.max_iter {
            break;
        }
        let mut accepted = None;
        let mut trial_eta = eta;
        for _ in 0..MAX_HALVINGS {
            let candidate = step(&params, &grad, trial_eta)?;
            let value = kappa_objective(&candidate, prob)?;
            if value < kappa {
                accepted = Some((candidate, value));
                break;
            }
            trial_eta /= 2.0;
        }
        match accepted {
            Some((candidate, value)) => {
                params = candidate;
                kappa = value;
                // Let the step grow back after a successful halving.
                eta = (trial_eta * 2.0).min(prob.eta);
            }
            None => break,
        }
    }

    let converged = kappa <= prob.kappa_stop;
    Ok(FlattenTrace { iterates, weighting: prob.rebuild(&params)?, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_four_cycles, BipartiteGraph, SpanningForest};
    use crate::group::random::{algebra_with_norm, random_element};
    use crate::group::{GroupContext, GroupElement};
    use crate::holonomy::Section;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square_problem(ctx: GroupContext, init: impl FnMut(usize, Edge) -> Result<GroupElement>) -> FlattenProblem {
        let g = BipartiteGraph::complete(2, 2);
        let fam = enumerate_four_cycles(&g);
        FlattenProblem::new(Weighting::from_fn(g, ctx, init).unwrap(), fam, MetricKind::Frobenius)
    }

    fn one_free_edge() -> FlattenProblem {
        let ctx = GroupContext::su2();
        let mut p = square_problem(ctx, |_, _| Ok(ctx.identity()));
        p.frozen = p.initial.graph().edges()[1..].iter().copied().collect();
        p
    }

    #[test]
    fn objective_at_zero_and_at_flat_point() {
        let ctx = GroupContext::sun(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = square_problem(ctx, |_, _| random_element(&ctx, &mut rng));
        let zeros = vec![AlgebraElement::zero(ctx).unwrap(); 4];
        assert_eq!(kappa_objective(&zeros, &p).unwrap(), 0.0);

        let g = p.initial.graph().clone();
        let s = Section::from_fn(ctx, &g, |_| Ok(algebra_with_norm(&ctx, 0.8, &mut rng)?.exp())).unwrap();
        let coherent = FlattenProblem::new(Weighting::from_section(g, &s).unwrap(), p.family.clone(), MetricKind::Frobenius);
        let params = coherent.initial_params().unwrap();
        assert!(kappa_objective(&params, &coherent).unwrap() < 1e-9);
    }

    #[test]
    fn single_free_edge_objective_is_weight_distance() {
        let p = one_free_edge();
        let x = AlgebraElement::su2(0.3, -0.2, 0.5);
        let expected = x.exp().distance(&GroupContext::su2().identity(), MetricKind::Frobenius).unwrap();
        assert!((kappa_objective(&[x], &p).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_closed_form_derivative() {
        // x = i φ σx: κ(φ) = 2√2 sin(φ/2), so dκ/dφ = √2 cos(φ/2) along σx.
        let p = one_free_edge();
        let phi = 0.2;
        let x = AlgebraElement::su2(phi, 0.0, 0.0);
        let grad = finite_diff_gradient(std::slice::from_ref(&x), &p, DEFAULT_FD_STEP).unwrap();
        let coords = x.coords();
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        // Derivative along the unit coordinate direction of x, converted to φ.
        let along: f64 = grad.iter().zip(&coords).map(|(g, c)| g * c / norm).sum();
        let dphi_per_unit = phi / norm;
        let analytic = 2f64.sqrt() * (phi / 2.0).cos() * dphi_per_unit;
        assert!((along - analytic).abs() < 1e-4 * analytic.abs(), "{along} vs {analytic}");
    }

    #[test]
    fn gradient_vanishes_at_a_flat_point() {
        // Central differences are symmetric across the kink at the identity.
        let p = one_free_edge();
        let zero = AlgebraElement::zero(GroupContext::su2()).unwrap();
        let g0 = finite_diff_gradient(&[zero], &p, DEFAULT_FD_STEP).unwrap();
        assert!(g0.iter().map(|g| g * g).sum::<f64>().sqrt() < 1e-4);
    }

    #[test]
    fn gradient_richardson_consistency() {
        let ctx = GroupContext::su2();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let p = square_problem(ctx, |_, _| Ok(algebra_with_norm(&ctx, 0.5, &mut rng)?.exp()));
            let params = p.initial_params().unwrap();
            let a = finite_diff_gradient(&params, &p, 1e-4).unwrap();
            let b = finite_diff_gradient(&params, &p, 2e-4).unwrap();
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let diff = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            assert!(diff < 1e-3 * na, "{diff} vs {na}");
        }
    }

    #[test]
    fn random_su2_squares_flatten() {
        let ctx = GroupContext::su2();
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = square_problem(ctx, |_, _| {
                let r = rng.random::<f64>() * 0.5;
                Ok(algebra_with_norm(&ctx, r, &mut rng)?.exp())
            });
            let trace = flatten(&p).unwrap();
            assert!(trace.final_kappa() < 1e-4, "seed {seed}: {}", trace.final_kappa());
            assert!(trace.converged);
            assert!(trace.iterates.windows(2).all(|w| w[1].kappa <= w[0].kappa));
            let recomputed = trace.weighting.contextuality_index(&p.family, p.metric, 0.0).unwrap().kappa;
            assert_eq!(recomputed, trace.final_kappa());
        }
    }

    #[test]
    fn glnr_flattens() {
        let ctx = GroupContext::glnr(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = square_problem(ctx, |_, _| Ok(algebra_with_norm(&ctx, 0.4, &mut rng)?.exp()));
        let trace = flatten(&p).unwrap();
        assert!(trace.final_kappa() < 1e-4, "{}", trace.final_kappa());
    }

    #[test]
    fn frozen_spanning_tree_still_flattens() {
        let ctx = GroupContext::su2();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = BipartiteGraph::complete(2, 3);
        let forest = SpanningForest::new(&g);
        let w = Weighting::from_fn(g.clone(), ctx, |_, _| Ok(algebra_with_norm(&ctx, 0.4, &mut rng)?.exp())).unwrap();
        let mut p = FlattenProblem::new(w, enumerate_four_cycles(&g), MetricKind::Frobenius);
        p.frozen = (0..g.edges().len()).filter(|&i| forest.is_tree_edge(i)).map(|i| g.edges()[i]).collect();

        // Oracle: propagate a section along the tree; it reproduces every tree
        // weight and its coherent extension has κ = 0.
        let mut s: Vec<Option<GroupElement>> = vec![None; g.n_vertices()];
        for &x in &forest.order {
            let value = match forest.parent[g.vertex_slot(x)] {
                None => ctx.identity(),
                Some(par) => p.initial.step_value(par, x).unwrap().multiply(s[g.vertex_slot(par)].as_ref().unwrap()).unwrap(),
            };
            s[g.vertex_slot(x)] = Some(value);
        }
        let section = Section::from_fn(ctx, &g, |x| Ok(s[g.vertex_slot(x)].clone().unwrap())).unwrap();
        let extension = Weighting::from_section(g.clone(), &section).unwrap();
        for e in &p.frozen {
            let d = extension.weight(e.0, e.1).unwrap().distance(p.initial.weight(e.0, e.1).unwrap(), MetricKind::Frobenius).unwrap();
            assert!(d < 1e-12);
        }
        assert!(extension.contextuality_index(&p.family, MetricKind::Frobenius, 0.0).unwrap().kappa < 1e-9);

        let trace = flatten(&p).unwrap();
        assert!(trace.final_kappa() < 1e-4, "{}", trace.final_kappa());
        for e in &p.frozen {
            assert_eq!(trace.weighting.weight(e.0, e.1), p.initial.weight(e.0, e.1));
        }
    }

    #[test]
    fn frozen_non_flat_cycle_does_not_converge() {
        let ctx = GroupContext::su2();
        let bump = AlgebraElement::su2(0.4, 0.0, 0.0).exp();
        let mut p = square_problem(ctx, |i, _| Ok(if i == 0 { bump.clone() } else { ctx.identity() }));
        p.frozen = p.initial.graph().edges().iter().copied().collect();
        let trace = flatten(&p).unwrap();
        assert!(!trace.converged);
        assert!(trace.final_kappa() > 0.0);
        assert_eq!(trace.iterates.len(), 1);
    }

    #[test]
    fn coherent_start_returns_immediately() {
        let ctx = GroupContext::su2();
        let p = square_problem(ctx, |_, _| Ok(ctx.identity()));
        let trace = flatten(&p).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterates.len(), 1);
        assert!(trace.to_csv().starts_with("iter,kappa,grad_norm\n0,"));
    }

    #[test]
    fn berry_objective_runs() {
        let ctx = GroupContext::un(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut p = square_problem(ctx, |_, _| Ok(algebra_with_norm(&ctx, 0.4, &mut rng)?.exp()));
        p.objective = Objective::Berry;
        p.max_iter = 50;
        let start = kappa_objective(&p.initial_params().unwrap(), &p).unwrap();
        let trace = flatten(&p).unwrap();
        assert!(trace.final_kappa() <= start);
    }

    #[test]
    fn z2_is_rejected() {
        let g = BipartiteGraph::complete(2, 2);
        let w = Weighting::from_fn(g.clone(), GroupContext::z2(), |_, _| Ok(GroupElement::bit(false))).unwrap();
        let p = FlattenProblem::new(w, enumerate_four_cycles(&g), MetricKind::Discrete);
        assert!(matches!(flatten(&p), Err(Error::NonMatrixContext(GroupKind::Z2))));
    }
}
