//! Orthonormal coordinates on the Lie algebras, under `⟨A, B⟩ = Re tr(A† B)`.

use super::element::Payload;
use super::linalg::{c, CMat, CVec, I};
use super::{AlgebraElement, GroupContext, GroupKind};
use crate::error::{Error, Result};

fn unit(n: usize, r: usize, col: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(r, col)] = c(1.0);
    m
}

fn off_diagonal_skew(n: usize, out: &mut Vec<CMat>) {
    let s = 0.5f64.sqrt();
    for j in 0..n {
        for k in j + 1..n {
            out.push((unit(n, j, k) - unit(n, k, j)) * c(s));
            out.push((unit(n, j, k) + unit(n, k, j)) * (I * s));
        }
    }
}

/// Dense basis matrices for a matrix context.
fn matrix_basis(ctx: &GroupContext) -> Vec<CMat> {
    let n = ctx.dim();
    let mut out = Vec::new();
    match ctx.kind() {
        GroupKind::SU2 | GroupKind::SUn => {
            off_diagonal_skew(n, &mut out);
            // i · diag(1, .., 1, -l, 0, ..) / sqrt(l (l + 1))
            for l in 1..n {
                let norm = ((l * (l + 1)) as f64).sqrt();
                let mut m = CMat::zeros(n, n);
                for j in 0..l {
                    m[(j, j)] = I / norm;
                }
                m[(l, l)] = I * (-(l as f64) / norm);
                out.push(m);
            }
        }
        GroupKind::Un => {
            off_diagonal_skew(n, &mut out);
            for j in 0..n {
                out.push(unit(n, j, j) * I);
            }
        }
        GroupKind::GLnR | GroupKind::PGLn => {
            for j in 0..n {
                for k in 0..n {
                    out.push(unit(n, j, k));
                }
            }
        }
        GroupKind::Z2 | GroupKind::DiagOp => unreachable!(),
    }
    out
}

/// Number of real coordinates of the algebra.
pub fn algebra_dim(ctx: &GroupContext) -> Result<usize> {
    let n = ctx.dim();
    Ok(match ctx.kind() {
        GroupKind::Z2 => return Err(Error::UnsupportedContext(GroupKind::Z2)),
        GroupKind::SU2 | GroupKind::SUn => n * n - 1,
        GroupKind::Un | GroupKind::GLnR | GroupKind::PGLn => n * n,
        GroupKind::DiagOp => n,
    })
}

/// Orthonormal basis of the algebra. `DiagOp` uses the real diagonal units.
pub fn basis(ctx: &GroupContext) -> Result<Vec<AlgebraElement>> {
    match ctx.kind() {
        GroupKind::Z2 => Err(Error::UnsupportedContext(GroupKind::Z2)),
        GroupKind::DiagOp => Ok((0..ctx.dim())
            .map(|k| {
                let mut d = CVec::zeros(ctx.dim());
                d[k] = c(1.0);
                AlgebraElement::from_parts_unchecked(*ctx, Payload::Diag(d))
            })
            .collect()),
        _ => Ok(matrix_basis(ctx)
            .into_iter()
            .map(|m| AlgebraElement::from_parts_unchecked(*ctx, Payload::Matrix(m)))
            .collect()),
    }
}

/// Orthonormal basis of the real symmetric `n x n` matrices.
pub fn symmetric_basis(n: usize) -> Vec<CMat> {
    let s = 0.5f64.sqrt();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        out.push(unit(n, j, j));
        for k in j + 1..n {
            out.push((unit(n, j, k) + unit(n, k, j)) * c(s));
        }
    }
    out
}

impl AlgebraElement {
    /// Coordinates in the orthonormal [`basis`].
    pub fn coords(&self) -> Vec<f64> {
        let ctx = *self.ctx();
        match self.payload() {
            Payload::Diag(d) => d.iter().map(|z| z.re).collect(),
            Payload::Matrix(m) => matrix_basis(&ctx).iter().map(|b| b.dotc(m).re).collect(),
            Payload::Bit(_) => Vec::new(),
        }
    }

    pub fn from_coords(ctx: GroupContext, coords: &[f64]) -> Result<Self> {
        let dim = algebra_dim(&ctx)?;
        if coords.len() != dim {
            return Err(Error::InvalidArgument(format!("expected {dim} coordinates, got {}", coords.len())));
        }
        let payload = match ctx.kind() {
            GroupKind::DiagOp => Payload::Diag(CVec::from_iterator(dim, coords.iter().map(|&x| c(x)))),
            _ => {
                let n = ctx.dim();
                let mut m = CMat::zeros(n, n);
                for (b, &x) in matrix_basis(&ctx).iter().zip(coords) {
                    m += b * c(x);
                }
                Payload::Matrix(m)
            }
        };
        Ok(AlgebraElement::from_parts_unchecked(ctx, payload))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contexts() -> Vec<GroupContext> {
        vec![
            GroupContext::su2(),
            GroupContext::sun(3).unwrap(),
            GroupContext::un(3).unwrap(),
            GroupContext::glnr(3).unwrap(),
            GroupContext::diag_op(2),
        ]
    }

    #[test]
    fn bases_are_orthonormal_and_valid() {
        for ctx in contexts() {
            let b = basis(&ctx).unwrap();
            assert_eq!(b.len(), algebra_dim(&ctx).unwrap());
            for (i, x) in b.iter().enumerate() {
                if ctx.kind() != GroupKind::DiagOp {
                    AlgebraElement::from_matrix(ctx, x.to_dense()).unwrap();
                }
                for (j, y) in b.iter().enumerate() {
                    let ip = x.to_dense().dotc(&y.to_dense()).re;
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - expected).abs() < 1e-14, "{ctx} <{i},{j}> = {ip}");
                }
            }
        }
    }

    #[test]
    fn coords_round_trip() {
        for ctx in contexts() {
            let dim = algebra_dim(&ctx).unwrap();
            let coords: Vec<f64> = (0..dim).map(|k| (k as f64 * 0.37).sin()).collect();
            let x = AlgebraElement::from_coords(ctx, &coords).unwrap();
            for (a, b) in x.coords().iter().zip(&coords) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn symmetric_basis_is_orthonormal() {
        let b = symmetric_basis(3);
        assert_eq!(b.len(), 6);
        for (i, x) in b.iter().enumerate() {
            assert_eq!(x, &x.transpose());
            for (j, y) in b.iter().enumerate() {
                let ip = x.dotc(y).re;
                assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
