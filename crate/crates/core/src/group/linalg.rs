//! Dense complex matrix kernels: exponential, principal logarithm, spectra.
//!
//! Every matrix here is small (side length in the single digits or low
//! tens), so the routines favour plain dense algorithms over anything
//! structure-exploiting.

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn determinant(a: &CMat) -> Complex64 {
    a.clone().determinant()
}

pub fn is_real(a: &CMat, tol: f64) -> bool {
    a.iter().all(|z| z.im.abs() <= tol)
}

/// Drops imaginary parts.
pub fn real_part(a: &CMat) -> CMat {
    a.map(|z| c(z.re))
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5)
}

pub fn skew_hermitian_part(a: &CMat) -> CMat {
    (a - a.adjoint()) * c(0.5)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(a.nrows(), a.ncols(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Complex eigenvalues via a Schur decomposition.
pub fn eigenvalues(a: &CMat) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(a.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::NoPrincipalLog("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Matrix exponential by scaling and squaring around a Taylor core.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scaled = a * c(0.5f64.powi(squarings));

    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=40 {
        term = &term * &scaled * c(1.0 / k as f64);
        sum += &term;
        if frobenius(&term) < 1e-18 * frobenius(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Principal square root by the Denman–Beavers iteration.
fn sqrtm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity(n);
    for _ in 0..100 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NoPrincipalLog("square-root iteration hit a singular iterate".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NoPrincipalLog("square-root iteration hit a singular iterate".into()))?;
        let y_next = (&y + z_inv) * c(0.5);
        let z_next = (&z + y_inv) * c(0.5);
        let delta = frobenius(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * frobenius(&y).max(1.0) {
            return Ok(y);
        }
    }
    Err(Error::NoPrincipalLog("square-root iteration did not converge".into()))
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Refuses matrices with an eigenvalue on the closed negative real axis
/// (including zero) instead of picking a branch.
pub fn logm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    for lambda in eigenvalues(a)? {
        let scale = lambda.norm();
        if scale < 1e-14 {
            return Err(Error::NoPrincipalLog("zero eigenvalue".into()));
        }
        if lambda.re < 0.0 && lambda.im.abs() <= 1e-12 * scale {
            return Err(Error::NoPrincipalLog(format!(
                "eigenvalue {:.6}{:+.3e}i on the negative real axis",
                lambda.re, lambda.im
            )));
        }
    }

    let eye = identity(n);
    let mut x = a.clone();
    let mut roots = 0;
    while frobenius(&(&x - &eye)) > 0.25 {
        if roots >= 60 {
            return Err(Error::NoPrincipalLog("too many square roots".into()));
        }
        x = sqrtm(&x)?;
        roots += 1;
    }

    // log X = 2 atanh(Z), Z = (X - I)(X + I)^{-1}
    let denom = (&x + &eye)
        .try_inverse()
        .ok_or_else(|| Error::NoPrincipalLog("X + I singular".into()))?;
    let z = (&x - &eye) * denom;
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut sum = z.clone();
    for k in 1..60 {
        power = &power * &z2;
        let term = &power * c(1.0 / (2 * k + 1) as f64);
        sum += &term;
        if frobenius(&term) < 1e-18 {
            break;
        }
    }
    Ok(sum * c(2.0 * 2f64.powi(roots)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(values.len(), values.iter().map(|&v| c(v))))
    }

    #[test]
    fn exp_of_diagonal_is_entrywise() {
        let e = expm(&diag(&[1.0, -2.0, 0.5]));
        assert!((e[(0, 0)].re - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-2f64).exp()).abs() < 1e-15);
        assert!((e[(2, 2)].re - 0.5f64.exp()).abs() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn exp_of_large_rotation_generator() {
        // [[0, -t], [t, 0]] -> rotation by t
        let t = 7.3;
        let a = CMat::from_row_slice(2, 2, &[c(0.0), c(-t), c(t), c(0.0)]);
        let e = expm(&a);
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-12);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-12);
    }

    #[test]
    fn log_of_diagonal() {
        let e = std::f64::consts::E;
        let l = logm(&diag(&[e, e * e])).unwrap();
        assert!((l[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((l[(1, 1)].re - 2.0).abs() < 1e-12);
        assert!(l[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn log_refuses_negative_spectrum() {
        assert!(matches!(logm(&diag(&[-1.0, -1.0])), Err(Error::NoPrincipalLog(_))));
        assert!(matches!(logm(&diag(&[-1.0, 1.0])), Err(Error::NoPrincipalLog(_))));
        assert!(matches!(logm(&diag(&[0.0, 1.0])), Err(Error::NoPrincipalLog(_))));
    }

    #[test]
    fn log_inverts_exp_on_non_normal_matrix() {
        let a = CMat::from_row_slice(
            3,
            3,
            &[c(0.1), c(0.7), c(-0.2), c(0.0), c(-0.3), c(0.4), c(0.25), c(0.0), c(0.2)],
        );
        let back = logm(&expm(&a)).unwrap();
        assert!(frobenius(&(back - a)) < 1e-12);
    }

    #[test]
    fn singular_values_sorted_descending() {
        let s = singular_values(&diag(&[-2.0, 0.5, 3.0]));
        assert_eq!(s.len(), 3);
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14 && (s[2] - 0.5).abs() < 1e-14);
    }
}
