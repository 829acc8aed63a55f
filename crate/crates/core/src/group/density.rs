//! Trace functionals on holonomy-induced states.

use super::linalg::{self, c, CMat};
use super::{GroupContext, GroupElement};
use crate::error::{Error, Result};
use crate::tolerance::tolerances;

/// A positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    ctx: GroupContext,
    matrix: CMat,
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

impl DensityState {
    pub fn new(ctx: GroupContext, matrix: CMat) -> Result<Self> {
        let tol = tolerances().psd;
        if matrix.nrows() != ctx.dim() || matrix.ncols() != ctx.dim() {
            return Err(Error::InvalidArgument("density matrix shape does not match context".into()));
        }
        let herm = linalg::frobenius(&(&matrix - matrix.adjoint()));
        if herm > 1e-9 {
            return Err(Error::NotHermitian(herm));
        }
        let trace = matrix.trace();
        if (trace - c(1.0)).norm() >= 1e-10 {
            return Err(Error::InvalidArgument(format!("density matrix trace is {trace}")));
        }
        let (values, _) = linalg::hermitian_eigen(&matrix);
        if values.iter().any(|&v| v < -tol) {
            return Err(Error::InvalidArgument("density matrix has a negative eigenvalue".into()));
        }
        Ok(Self { ctx, matrix: linalg::hermitian_part(&matrix) })
    }

    /// `ρ = h h† / tr(h h†)`.
    pub fn from_holonomy(h: &GroupElement) -> Result<Self> {
        let dense = h.to_dense().ok_or(Error::UnsupportedContext(h.ctx().kind()))?;
        let gram = &dense * dense.adjoint();
        let trace = gram.trace().re;
        if trace.abs() < 1e-300 {
            return Err(Error::ZeroTrace(trace));
        }
        Ok(Self { ctx: *h.ctx(), matrix: linalg::hermitian_part(&(gram * c(1.0 / trace))) })
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.matrix).0
    }

    /// `-tr(ρ ln ρ)` in nats.
    pub fn von_neumann_entropy(&self) -> f64 {
        let s = -self.eigenvalues().into_iter().map(xlogx).sum::<f64>();
        s.max(0.0)
    }

    /// `tr(ρ (ln ρ - ln σ))`.
    pub fn relative_entropy(&self, sigma: &DensityState) -> Result<f64> {
        self.ctx.ensure_same(&sigma.ctx)?;
        let tol = tolerances().psd;
        let own = self.eigenvalues().into_iter().map(xlogx).sum::<f64>();
        let (mu, vectors) = linalg::hermitian_eigen(&sigma.matrix);
        let mut cross = 0.0;
        for (k, &m) in mu.iter().enumerate() {
            let v = vectors.column(k);
            // weight of ρ on the k-th eigenvector of σ
            let w = (v.adjoint() * &self.matrix * v)[(0, 0)].re;
            if m <= tol {
                if w > tol {
                    return Err(Error::SupportViolation);
                }
                continue;
            }
            cross += w * m.ln();
        }
        Ok(own - cross)
    }

    /// `tr(ρ H)` for a Hermitian `H`.
    pub fn expected_energy(&self, hamiltonian: &CMat) -> Result<f64> {
        if hamiltonian.nrows() != self.matrix.nrows() || hamiltonian.ncols() != self.matrix.ncols() {
            return Err(Error::InvalidArgument("Hamiltonian shape does not match the state".into()));
        }
        let dev = linalg::frobenius(&(hamiltonian - hamiltonian.adjoint()));
        if dev > 1e-9 {
            return Err(Error::NotHermitian(dev));
        }
        Ok((&self.matrix * hamiltonian).trace().re)
    }
}
