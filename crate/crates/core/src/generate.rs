//! Random instances on complete bipartite graphs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::group::random::{perturbation, random_element};
use crate::group::GroupContext;
use crate::holonomy::{Section, Weighting};
use crate::stochastic::replica_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenMode {
    /// `w_ij = s(j) s(i)⁻¹` for a random section `s`.
    Coherent,
    /// A coherent weighting with each weight multiplied by `exp(x)`, `‖x‖_F = scale`.
    /// For `Z2` each bit flips with probability `scale`.
    Noise(f64),
    /// Independent random weights.
    Random,
}

pub fn generate(ctx: GroupContext, n_visible: usize, n_hidden: usize, mode: GenMode, seed: u64) -> Result<Weighting> {
    if n_visible == 0 || n_hidden == 0 {
        return Err(Error::InvalidArgument("both layers need at least one vertex".into()));
    }
    let graph = BipartiteGraph::complete(n_visible, n_hidden);
    let mut rng = replica_rng(seed, 0);
    match mode {
        GenMode::Random => Weighting::from_fn(graph, ctx, |_, _| random_element(&ctx, &mut rng)),
        GenMode::Coherent | GenMode::Noise(_) => {
            let section = Section::from_fn(ctx, &graph, |_| random_element(&ctx, &mut rng))?;
            let coherent = Weighting::from_section(graph.clone(), &section)?;
            let scale = match mode {
                GenMode::Noise(s) if s < 0.0 || !s.is_finite() => {
                    return Err(Error::InvalidArgument(format!("noise scale {s} must be non-negative")))
                }
                GenMode::Noise(s) if s > 0.0 => s,
                _ => return Ok(coherent),
            };
            let weights = coherent.weights().to_vec();
            Weighting::from_fn(graph, ctx, |i, _| perturbation(&ctx, scale, &mut rng)?.multiply(&weights[i]))
        }
    }
}
