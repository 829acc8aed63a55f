use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{mean, Weighting};
use crate::error::{Error, Result};
use crate::graph::{Cycle, CycleFamily};
use crate::group::GroupElement;

/// Trace phases over a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerrySummary {
    pub gamma: Vec<f64>,
    /// Mean of `|γ(C)|`.
    pub kappa_berry: f64,
    /// Mean of the signed `γ(C)`.
    pub kappa_berry_signed: f64,
}

/// Principal argument in `(-π, π]`.
pub(crate) fn principal_arg(re: f64, im: f64) -> f64 {
    let a = im.atan2(re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// `arg tr h`, undefined for `Z2` and for vanishing traces.
pub fn trace_phase(h: &GroupElement) -> Result<f64> {
    let dense = h.to_dense().ok_or(Error::UnsupportedContext(h.ctx().kind()))?;
    let tr = dense.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::ZeroTrace(tr.norm()));
    }
    Ok(principal_arg(tr.re, tr.im))
}

impl BerrySummary {
    pub fn from_phases(gamma: Vec<f64>) -> Self {
        Self {
            kappa_berry: mean(gamma.iter().map(|g| g.abs())),
            kappa_berry_signed: mean(gamma.iter().copied()),
            gamma,
        }
    }
}

impl Weighting {
    /// `γ(C) = arg tr Hol(C)`.
    pub fn berry_phase(&self, cycle: &Cycle) -> Result<f64> {
        trace_phase(&self.holonomy(cycle)?)
    }

    pub fn berry_index(&self, family: &CycleFamily) -> Result<BerrySummary> {
        if family.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let gamma = family.cycles.iter().map(|c| self.berry_phase(c)).collect::<Result<Vec<_>>>()?;
        Ok(BerrySummary::from_phases(gamma))
    }
}
