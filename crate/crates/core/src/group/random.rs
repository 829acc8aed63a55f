//! Random group and algebra elements.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::algebra::algebra_dim;
use super::linalg::{self, c, CMat};
use super::{AlgebraElement, GroupContext, GroupElement, GroupKind};
use crate::error::Result;

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Algebra element with independent `N(0, scale²)` orthonormal coordinates.
pub fn gaussian_algebra<R: Rng + ?Sized>(ctx: &GroupContext, scale: f64, rng: &mut R) -> Result<AlgebraElement> {
    let dim = algebra_dim(ctx)?;
    let coords: Vec<f64> = (0..dim).map(|_| scale * normal(rng)).collect();
    AlgebraElement::from_coords(*ctx, &coords)
}

/// Algebra element with a uniformly random direction and Frobenius norm `norm`.
pub fn algebra_with_norm<R: Rng + ?Sized>(ctx: &GroupContext, norm: f64, rng: &mut R) -> Result<AlgebraElement> {
    let x = gaussian_algebra(ctx, 1.0, rng)?;
    let len = x.frobenius_norm();
    Ok(if len > 0.0 { x.scaled(norm / len) } else { x })
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let z = CMat::from_fn(n, n, |_, _| Complex64::new(normal(rng), normal(rng)) * 0.5f64.sqrt());
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix the phase ambiguity so the distribution is exactly Haar.
    let mut q = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// A random element spread over the whole group (Haar for compact kinds).
pub fn random_element<R: Rng + ?Sized>(ctx: &GroupContext, rng: &mut R) -> Result<GroupElement> {
    match ctx.kind() {
        GroupKind::Z2 => Ok(GroupElement::bit(rng.random::<bool>())),
        GroupKind::Un => GroupElement::from_matrix(*ctx, haar_unitary(ctx.dim(), rng)),
        GroupKind::SU2 | GroupKind::SUn => {
            let n = ctx.dim();
            let u = haar_unitary(n, rng);
            let det = linalg::determinant(&u);
            let root = Complex64::from_polar(1.0, det.arg() / n as f64);
            GroupElement::from_matrix(*ctx, u / root)
        }
        GroupKind::GLnR | GroupKind::PGLn | GroupKind::DiagOp => Ok(gaussian_algebra(ctx, 0.5, rng)?.exp()),
    }
}

/// Element `exp(x)` with `x` drawn by [`gaussian_algebra`]; `Z2` flips with probability `scale`.
pub fn perturbation<R: Rng + ?Sized>(ctx: &GroupContext, scale: f64, rng: &mut R) -> Result<GroupElement> {
    if ctx.kind() == GroupKind::Z2 {
        return Ok(GroupElement::bit(rng.random::<f64>() < scale));
    }
    Ok(algebra_with_norm(ctx, scale, rng)?.exp())
}

/// Real symmetric matrix with the given coordinates in [`symmetric_basis`](super::algebra::symmetric_basis).
pub fn symmetric_from_coords(n: usize, coords: &[f64]) -> CMat {
    let mut m = CMat::zeros(n, n);
    for (b, &x) in super::algebra::symmetric_basis(n).iter().zip(coords) {
        m += b * c(x);
    }
    m
}
