use num_complex::Complex64;

use super::linalg::{self, c, CMat, CVec};
use super::{GroupContext, GroupKind};
use crate::error::{Error, Result};
use crate::tolerance::tolerances;

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Bit(bool),
    Matrix(CMat),
    Diag(CVec),
}

/// A value in one of the supported groups.
///
/// Constructors validate the group's invariants; the arithmetic below
/// preserves them up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    ctx: GroupContext,
    payload: Payload,
}

/// An element of the Lie algebra of a continuous group context.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    ctx: GroupContext,
    payload: Payload,
}

fn pauli(index: usize) -> CMat {
    let z = c(0.0);
    let one = c(1.0);
    match index {
        0 => CMat::from_row_slice(2, 2, &[z, one, one, z]),
        1 => CMat::from_row_slice(2, 2, &[z, -linalg::I, linalg::I, z]),
        _ => CMat::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

/// Rescales a real representative so that |det| = 1.
fn normalize_projective(m: CMat) -> Result<CMat> {
    let det = linalg::determinant(&m).re;
    if det.abs() <= tolerances().singular {
        return Err(Error::NearSingular { det: det.abs() });
    }
    // Already normalized representatives are kept bit-for-bit.
    if (det.abs() - 1.0).abs() <= 8.0 * f64::EPSILON {
        return Ok(m);
    }
    let scale = det.abs().powf(-1.0 / m.nrows() as f64);
    Ok(m * c(scale))
}

impl GroupContext {
    /// The neutral element `e_G`.
    pub fn identity(&self) -> GroupElement {
        let payload = match self.kind() {
            GroupKind::Z2 => Payload::Bit(false),
            GroupKind::DiagOp => Payload::Diag(CVec::from_element(self.dim(), c(1.0))),
            _ => Payload::Matrix(linalg::identity(self.dim())),
        };
        GroupElement { ctx: *self, payload }
    }
}

impl GroupElement {
    pub fn bit(value: bool) -> Self {
        Self { ctx: GroupContext::z2(), payload: Payload::Bit(value) }
    }

    /// Validates `m` against the invariants of `ctx`.
    ///
    /// Real kinds drop imaginary parts below the algebra tolerance; `PGLn`
    /// representatives are rescaled to |det| = 1.
    pub fn from_matrix(ctx: GroupContext, m: CMat) -> Result<Self> {
        let tol = tolerances();
        let kind = ctx.kind();
        let invalid = |reason: String| Error::InvalidElement { kind, reason };
        match kind {
            GroupKind::Z2 => return Err(invalid("Z2 elements are bits".into())),
            GroupKind::DiagOp => return Err(invalid("DiagOp elements are diagonal vectors".into())),
            _ => {}
        }
        if m.nrows() != ctx.dim() || m.ncols() != ctx.dim() {
            return Err(invalid(format!("expected {0}x{0}, got {1}x{2}", ctx.dim(), m.nrows(), m.ncols())));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("non-finite entry".into()));
        }
        let m = match kind {
            GroupKind::SU2 | GroupKind::SUn | GroupKind::Un => {
                let residual = linalg::frobenius(&(m.adjoint() * &m - linalg::identity(ctx.dim())));
                if residual >= tol.unitary {
                    return Err(invalid(format!("‖U†U - I‖_F = {residual:e}")));
                }
                if kind.is_special_unitary() {
                    let det = linalg::determinant(&m);
                    if (det - c(1.0)).norm() >= tol.unitary {
                        return Err(invalid(format!("det = {det}")));
                    }
                }
                m
            }
            GroupKind::GLnR | GroupKind::PGLn => {
                let scale = linalg::frobenius(&m).max(1.0);
                if !linalg::is_real(&m, tol.algebra * scale) {
                    return Err(invalid("entries must be real".into()));
                }
                let m = linalg::real_part(&m);
                let det = linalg::determinant(&m).re;
                if det.abs() <= tol.singular {
                    return Err(Error::NearSingular { det: det.abs() });
                }
                if kind == GroupKind::PGLn {
                    normalize_projective(m)?
                } else {
                    m
                }
            }
            GroupKind::Z2 | GroupKind::DiagOp => unreachable!(),
        };
        Ok(Self { ctx, payload: Payload::Matrix(m) })
    }

    pub fn from_diag(ctx: GroupContext, d: CVec) -> Result<Self> {
        let kind = ctx.kind();
        if kind != GroupKind::DiagOp {
            return Err(Error::InvalidElement { kind, reason: "only DiagOp takes a diagonal payload".into() });
        }
        if d.len() != ctx.dim() {
            return Err(Error::InvalidElement { kind, reason: format!("expected {} entries, got {}", ctx.dim(), d.len()) });
        }
        if d.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidElement { kind, reason: "non-finite entry".into() });
        }
        if d.iter().any(|z| z.norm() <= tolerances().singular) {
            return Err(Error::NearSingular { det: 0.0 });
        }
        Ok(Self { ctx, payload: Payload::Diag(d) })
    }

    pub(crate) fn from_parts_unchecked(ctx: GroupContext, payload: Payload) -> Self {
        Self { ctx, payload }
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn as_bit(&self) -> Option<bool> {
        match self.payload {
            Payload::Bit(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&CMat> {
        match &self.payload {
            Payload::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Dense matrix form; diagonal payloads are expanded. `None` for `Z2`.
    pub fn to_dense(&self) -> Option<CMat> {
        match &self.payload {
            Payload::Bit(_) => None,
            Payload::Matrix(m) => Some(m.clone()),
            Payload::Diag(d) => Some(CMat::from_diagonal(d)),
        }
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        self.ctx.ensure_same(&other.ctx)?;
        let payload = match (&self.payload, &other.payload) {
            (Payload::Bit(a), Payload::Bit(b)) => Payload::Bit(a ^ b),
            (Payload::Matrix(a), Payload::Matrix(b)) => {
                let prod = a * b;
                if self.ctx.kind() == GroupKind::PGLn {
                    Payload::Matrix(normalize_projective(prod)?)
                } else {
                    Payload::Matrix(prod)
                }
            }
            (Payload::Diag(a), Payload::Diag(b)) => Payload::Diag(a.component_mul(b)),
            _ => unreachable!("payload shape is fixed by the context"),
        };
        Ok(GroupElement { ctx: self.ctx, payload })
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        let payload = match &self.payload {
            Payload::Bit(b) => Payload::Bit(*b),
            Payload::Matrix(m) if self.ctx.kind().is_unitary() => Payload::Matrix(m.adjoint()),
            Payload::Matrix(m) => {
                let det = linalg::determinant(m).norm();
                if det < tolerances().singular {
                    return Err(Error::NearSingular { det });
                }
                let inv = m.clone().try_inverse().ok_or(Error::NearSingular { det })?;
                Payload::Matrix(inv)
            }
            Payload::Diag(d) => Payload::Diag(d.map(|z| c(1.0) / z)),
        };
        Ok(GroupElement { ctx: self.ctx, payload })
    }

    /// Principal logarithm.
    pub fn log(&self) -> Result<AlgebraElement> {
        let kind = self.ctx.kind();
        let payload = match &self.payload {
            Payload::Bit(_) => return Err(Error::UnsupportedContext(kind)),
            Payload::Diag(d) => {
                let mut out = CVec::zeros(d.len());
                for (slot, z) in out.iter_mut().zip(d.iter()) {
                    if z.im == 0.0 && z.re <= 0.0 {
                        return Err(Error::NoPrincipalLog(format!("diagonal entry {} on the branch cut", z.re)));
                    }
                    *slot = z.ln();
                }
                Payload::Diag(out)
            }
            Payload::Matrix(m) => {
                let mut rep = m.clone();
                // An odd-dimensional projective class always has a det > 0 representative.
                if kind == GroupKind::PGLn && linalg::determinant(&rep).re < 0.0 && rep.nrows() % 2 == 1 {
                    rep = -rep;
                }
                let log = linalg::logm(&rep)?;
                let log = match kind {
                    GroupKind::SU2 | GroupKind::SUn | GroupKind::Un => {
                        let skew = linalg::skew_hermitian_part(&log);
                        if kind.is_special_unitary() && skew.trace().norm() > 1e-8 {
                            return Err(Error::NoPrincipalLog(format!(
                                "principal logarithm has trace {} and leaves su(n)",
                                skew.trace()
                            )));
                        }
                        skew
                    }
                    _ => linalg::real_part(&log),
                };
                Payload::Matrix(log)
            }
        };
        Ok(AlgebraElement { ctx: self.ctx, payload })
    }
}

impl AlgebraElement {
    /// Validates the Lie algebra constraint for `ctx`.
    pub fn from_matrix(ctx: GroupContext, m: CMat) -> Result<Self> {
        let kind = ctx.kind();
        let tol = tolerances().algebra;
        let invalid = |reason: String| Error::InvalidElement { kind, reason };
        match kind {
            GroupKind::Z2 => return Err(Error::UnsupportedContext(kind)),
            GroupKind::DiagOp => return Err(invalid("DiagOp algebra elements are diagonal vectors".into())),
            _ => {}
        }
        if m.nrows() != ctx.dim() || m.ncols() != ctx.dim() {
            return Err(invalid(format!("expected {0}x{0}, got {1}x{2}", ctx.dim(), m.nrows(), m.ncols())));
        }
        let scale = linalg::frobenius(&m).max(1.0);
        if kind.is_unitary() {
            let herm = linalg::frobenius(&(&m + m.adjoint()));
            if herm > tol * scale {
                return Err(invalid(format!("not skew-Hermitian (‖X + X†‖_F = {herm:e})")));
            }
            if kind.is_special_unitary() && m.trace().norm() > tol * scale {
                return Err(invalid(format!("not traceless (tr = {})", m.trace())));
            }
        } else if !linalg::is_real(&m, tol * scale) {
            return Err(invalid("entries must be real".into()));
        }
        Ok(Self { ctx, payload: Payload::Matrix(m) })
    }

    pub fn from_diag(ctx: GroupContext, d: CVec) -> Result<Self> {
        let kind = ctx.kind();
        if kind != GroupKind::DiagOp {
            return Err(Error::InvalidElement { kind, reason: "only DiagOp takes a diagonal payload".into() });
        }
        if d.len() != ctx.dim() || d.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidElement { kind, reason: "bad diagonal payload".into() });
        }
        Ok(Self { ctx, payload: Payload::Diag(d) })
    }

    /// `i (a σx + b σy + c σz)` in su(2).
    pub fn su2(a: f64, b: f64, cz: f64) -> Self {
        let m = (pauli(0) * c(a) + pauli(1) * c(b) + pauli(2) * c(cz)) * linalg::I;
        Self { ctx: GroupContext::su2(), payload: Payload::Matrix(m) }
    }

    pub fn zero(ctx: GroupContext) -> Result<Self> {
        let payload = match ctx.kind() {
            GroupKind::Z2 => return Err(Error::UnsupportedContext(GroupKind::Z2)),
            GroupKind::DiagOp => Payload::Diag(CVec::zeros(ctx.dim())),
            _ => Payload::Matrix(CMat::zeros(ctx.dim(), ctx.dim())),
        };
        Ok(Self { ctx, payload })
    }

    pub(crate) fn from_parts_unchecked(ctx: GroupContext, payload: Payload) -> Self {
        Self { ctx, payload }
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn as_matrix(&self) -> Option<&CMat> {
        match &self.payload {
            Payload::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn to_dense(&self) -> CMat {
        match &self.payload {
            Payload::Matrix(m) => m.clone(),
            Payload::Diag(d) => CMat::from_diagonal(d),
            Payload::Bit(_) => unreachable!("no algebra for Z2"),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let payload = match &self.payload {
            Payload::Matrix(m) => Payload::Matrix(m * c(factor)),
            Payload::Diag(d) => Payload::Diag(d * c(factor)),
            Payload::Bit(_) => unreachable!("no algebra for Z2"),
        };
        Self { ctx: self.ctx, payload }
    }

    /// Multiplies by the imaginary unit without re-validating; used for the
    /// skew reading of real diagonal generators.
    pub fn times_i(&self) -> Self {
        let payload = match &self.payload {
            Payload::Matrix(m) => Payload::Matrix(m * linalg::I),
            Payload::Diag(d) => Payload::Diag(d * linalg::I),
            Payload::Bit(_) => unreachable!("no algebra for Z2"),
        };
        Self { ctx: self.ctx, payload }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<Self> {
        self.ctx.ensure_same(&other.ctx)?;
        let payload = match (&self.payload, &other.payload) {
            (Payload::Matrix(a), Payload::Matrix(b)) => Payload::Matrix(a + b),
            (Payload::Diag(a), Payload::Diag(b)) => Payload::Diag(a + b),
            _ => unreachable!("payload shape is fixed by the context"),
        };
        Ok(Self { ctx: self.ctx, payload })
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.payload {
            Payload::Matrix(m) => linalg::frobenius(m),
            Payload::Diag(d) => d.norm(),
            Payload::Bit(_) => 0.0,
        }
    }

    /// Exponential map into the group.
    pub fn exp(&self) -> GroupElement {
        let kind = self.ctx.kind();
        let payload = match &self.payload {
            Payload::Diag(d) => Payload::Diag(d.map(|z| z.exp())),
            Payload::Matrix(m) if kind == GroupKind::SU2 => Payload::Matrix(su2_exp(m)),
            Payload::Matrix(m) => {
                let e = linalg::expm(m);
                match kind {
                    GroupKind::GLnR => Payload::Matrix(linalg::real_part(&e)),
                    // exp(X) has det e^{tr X} > 0, so normalization cannot fail.
                    GroupKind::PGLn => Payload::Matrix(
                        normalize_projective(linalg::real_part(&e)).expect("exp is invertible"),
                    ),
                    _ => Payload::Matrix(e),
                }
            }
            Payload::Bit(_) => unreachable!("no algebra for Z2"),
        };
        GroupElement { ctx: self.ctx, payload }
    }
}

/// `exp(i θ n·σ) = cos θ I + i sin θ (n·σ)`.
fn su2_exp(x: &CMat) -> CMat {
    // x = i (a σx + b σy + c σz) = [[i c, b + i a], [i a - b, -i c]]
    let a = x[(0, 1)].im;
    let b = x[(0, 1)].re;
    let cz = x[(0, 0)].im;
    let theta = (a * a + b * b + cz * cz).sqrt();
    let (cos, sinc) = if theta < 1e-8 {
        (1.0 - theta * theta / 2.0, 1.0 - theta * theta / 6.0)
    } else {
        (theta.cos(), theta.sin() / theta)
    };
    let n_sigma = pauli(0) * c(a) + pauli(1) * c(b) + pauli(2) * c(cz);
    linalg::identity(2) * c(cos) + n_sigma * Complex64::new(0.0, sinc)
}
