//! Random weightings and Monte Carlo estimates of `κ_stoch`.
//!
//! Replica `i` of an estimate draws from ChaCha8 stream `i` under the
//! caller's seed, so results do not depend on thread scheduling.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, CycleFamily};
use crate::group::algebra::{algebra_dim, symmetric_basis};
use crate::group::random::symmetric_from_coords;
use crate::group::{AlgebraElement, GroupContext, GroupElement, GroupKind, MetricKind};
use crate::holonomy::Weighting;

/// Identifier stored with every estimate.
pub const RNG_NAME: &str = "chacha8";

/// Rejection attempts allowed without a single acceptance.
const STALL_ATTEMPTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistributionSpec {
    /// Bit 1 with probability `p`.
    BernoulliZ2 { p: f64 },
    /// Haar measure on SU(2) conditioned on `‖U - I‖_F < eps`.
    HaarBallSU2 { eps: f64 },
    /// `exp(X)` with Gaussian algebra coordinates; symmetric `X` for `GLnR`.
    MatrixGaussian {
        ctx: GroupContext,
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        covariance: Option<Vec<Vec<f64>>>,
    },
}

impl DistributionSpec {
    pub fn bernoulli(p: f64) -> Self {
        DistributionSpec::BernoulliZ2 { p }
    }

    pub fn haar_ball(eps: f64) -> Self {
        DistributionSpec::HaarBallSU2 { eps }
    }

    pub fn gaussian(ctx: GroupContext, scale: f64) -> Self {
        DistributionSpec::MatrixGaussian { ctx, scale, covariance: None }
    }

    pub fn ctx(&self) -> GroupContext {
        match self {
            DistributionSpec::BernoulliZ2 { .. } => GroupContext::z2(),
            DistributionSpec::HaarBallSU2 { .. } => GroupContext::su2(),
            DistributionSpec::MatrixGaussian { ctx, .. } => *ctx,
        }
    }

    fn name(&self) -> String {
        match self {
            DistributionSpec::BernoulliZ2 { p } => format!("bernoulli({p})"),
            DistributionSpec::HaarBallSU2 { eps } => format!("haar-ball({eps})"),
            DistributionSpec::MatrixGaussian { scale, .. } => format!("matrix-gaussian({scale})"),
        }
    }

    /// Checks parameters and that the distribution can produce `ctx` weights.
    pub fn validate_for(&self, ctx: &GroupContext) -> Result<()> {
        let incompatible = || Error::IncompatibleDistribution { dist: self.name(), kind: ctx.kind() };
        if self.ctx() != *ctx {
            return Err(incompatible());
        }
        match self {
            DistributionSpec::BernoulliZ2 { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidDistribution(format!("p = {p} is not a probability")));
                }
            }
            DistributionSpec::HaarBallSU2 { eps } => {
                if !(eps.is_finite() && *eps > 0.0) {
                    return Err(Error::InvalidDistribution(format!("eps = {eps} must be positive")));
                }
            }
            DistributionSpec::MatrixGaussian { ctx, scale, covariance } => {
                if matches!(ctx.kind(), GroupKind::Z2 | GroupKind::PGLn | GroupKind::DiagOp) {
                    return Err(incompatible());
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::InvalidDistribution(format!("scale = {scale} must be positive")));
                }
                if let Some(cov) = covariance {
                    cholesky(cov, gaussian_dim(ctx)?)?;
                }
            }
        }
        Ok(())
    }
}

fn gaussian_dim(ctx: &GroupContext) -> Result<usize> {
    match ctx.kind() {
        GroupKind::GLnR => Ok(symmetric_basis(ctx.dim()).len()),
        _ => algebra_dim(ctx),
    }
}

fn cholesky(cov: &[Vec<f64>], dim: usize) -> Result<DMatrix<f64>> {
    if cov.len() != dim || cov.iter().any(|row| row.len() != dim) {
        return Err(Error::InvalidDistribution(format!("covariance must be {dim}x{dim}")));
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| cov[i][j]);
    if (&m - m.transpose()).amax() > 1e-12 {
        return Err(Error::InvalidDistribution("covariance is not symmetric".into()));
    }
    m.cholesky()
        .map(|ch| ch.l())
        .ok_or_else(|| Error::InvalidDistribution("covariance is not positive definite".into()))
}

/// Draws one weight per edge from `dist` using `rng`.
pub fn sample_weighting_with<R: Rng + ?Sized>(
    graph: &BipartiteGraph,
    dist: &DistributionSpec,
    rng: &mut R,
) -> Result<Weighting> {
    let ctx = dist.ctx();
    dist.validate_for(&ctx)?;
    let sampler = Sampler::new(dist)?;
    Weighting::from_fn(graph.clone(), ctx, |_, _| sampler.draw(rng))
}

/// Stream 0 of `seed`.
pub fn sample_weighting(graph: &BipartiteGraph, dist: &DistributionSpec, seed: u64) -> Result<Weighting> {
    sample_weighting_with(graph, dist, &mut replica_rng(seed, 0))
}

pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Per-distribution state computed once per weighting.
enum Sampler {
    Bernoulli(f64),
    HaarBall { eps: f64, t_max: f64, bound: f64 },
    Gaussian { ctx: GroupContext, scale: f64, chol: Option<DMatrix<f64>>, dim: usize },
}

impl Sampler {
    fn new(dist: &DistributionSpec) -> Result<Self> {
        Ok(match dist {
            DistributionSpec::BernoulliZ2 { p } => Sampler::Bernoulli(*p),
            DistributionSpec::HaarBallSU2 { eps } => {
                // ‖exp(i t n·σ) - I‖_F = 2√2 sin(t/2) for t ∈ [0, π].
                let t_max = if *eps >= 2.0 * SQRT_2 { PI } else { 2.0 * (eps / (2.0 * SQRT_2)).asin() };
                let bound = t_max.min(PI / 2.0).sin().powi(2);
                Sampler::HaarBall { eps: *eps, t_max, bound }
            }
            DistributionSpec::MatrixGaussian { ctx, scale, covariance } => {
                let dim = gaussian_dim(ctx)?;
                let chol = covariance.as_deref().map(|c| cholesky(c, dim)).transpose()?;
                Sampler::Gaussian { ctx: *ctx, scale: *scale, chol, dim }
            }
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<GroupElement> {
        match self {
            Sampler::Bernoulli(p) => Ok(GroupElement::bit(rng.random::<f64>() < *p)),
            Sampler::HaarBall { eps, t_max, bound } => haar_ball(*eps, *t_max, *bound, rng),
            Sampler::Gaussian { ctx, scale, chol, dim } => {
                let z: Vec<f64> = (0..*dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let coords: Vec<f64> = match chol {
                    Some(l) => (l * nalgebra::DVector::from_vec(z)).iter().map(|x| scale * x).collect(),
                    None => z.iter().map(|x| scale * x).collect(),
                };
                let x = match ctx.kind() {
                    GroupKind::GLnR => AlgebraElement::from_matrix(*ctx, symmetric_from_coords(ctx.dim(), &coords))?,
                    _ => AlgebraElement::from_coords(*ctx, &coords)?,
                };
                Ok(x.exp())
            }
        }
    }
}

/// Axis uniform on the sphere, rotation parameter `t` with the Haar marginal
/// `∝ sin² t` restricted to `[0, t_max]`, then the ball condition checked on
/// the matrix itself.
fn haar_ball<R: Rng + ?Sized>(eps: f64, t_max: f64, bound: f64, rng: &mut R) -> Result<GroupElement> {
    let id = GroupContext::su2().identity();
    for _ in 0..STALL_ATTEMPTS {
        let t = t_max * rng.random::<f64>();
        if bound * rng.random::<f64>() >= t.sin().powi(2) {
            continue;
        }
        let n: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len == 0.0 {
            continue;
        }
        let u = AlgebraElement::su2(t * n[0] / len, t * n[1] / len, t * n[2] / len).exp();
        if u.distance(&id, MetricKind::Frobenius)? < eps {
            return Ok(u);
        }
    }
    Err(Error::RejectionStall { accepted: 0, attempts: STALL_ATTEMPTS })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub rng: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

/// Monte Carlo estimate of `κ_stoch` from `n` independent weightings.
pub fn estimate_kappa_stoch(
    graph: &BipartiteGraph,
    dist: &DistributionSpec,
    family: &CycleFamily,
    metric: MetricKind,
    n: usize,
    seed: u64,
    keep_samples: bool,
) -> Result<EstimatorResult> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n}")));
    }
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let ctx = dist.ctx();
    dist.validate_for(&ctx)?;
    metric.validate_for(&ctx)?;
    let samples = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let w = sample_weighting_with(graph, dist, &mut replica_rng(seed, i))?;
            Ok(w.contextuality_index(family, metric, 0.0)?.kappa)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(EstimatorResult {
        mean,
        std_error: (var / n as f64).sqrt(),
        n_samples: n,
        seed,
        rng: RNG_NAME.to_string(),
        samples: keep_samples.then_some(samples),
    })
}

/// `P(Hol(C) = 1) = (1 - (1 - 2p)^k) / 2` for `k` independent Bernoulli(p) edges.
pub fn z2_cycle_odds(p: f64, k: u32) -> f64 {
    (1.0 - (1.0 - 2.0 * p).powi(k as i32)) / 2.0
}

/// `-p ln p - (1-p) ln(1-p)` with `0 ln 0 = 0`.
pub fn bernoulli_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(p) + term(1.0 - p)
}
