//! Small dense complex matrices.
//!
//! Storage and factorisations come from `nalgebra`; this module adds the few
//! checked operations the rest of the crate relies on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as Cx;

use crate::error::{GmError, Result};

pub type CMatrix = DMatrix<Cx>;
pub type CVector = DVector<Cx>;

pub fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn from_real(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Cx::new(x, 0.0))
}

/// Inverse with a residual check. Fails when `A A^{-1}` is not close to the
/// identity or the condition estimate exceeds `1e14`.
pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(GmError::InvalidArgument("inverse of a non-square matrix".into()));
    }
    let inv = a
        .clone()
        .lu()
        .try_inverse()
        .ok_or(GmError::SingularMatrix { cond: f64::INFINITY })?;
    let cond = condition_estimate_with(a, &inv);
    let resid = max_abs(&(a * &inv - identity(n)));
    if !cond.is_finite() || cond > 1e14 || resid > 1e-6 {
        return Err(GmError::SingularMatrix { cond });
    }
    Ok(inv)
}

fn inf_norm(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn condition_estimate_with(a: &CMatrix, inv: &CMatrix) -> f64 {
    inf_norm(a) * inf_norm(inv)
}

/// Infinity-norm condition number `||A|| ||A^{-1}||`.
pub fn condition_estimate(a: &CMatrix) -> f64 {
    match a.clone().lu().try_inverse() {
        Some(inv) => condition_estimate_with(a, &inv),
        None => f64::INFINITY,
    }
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = inf_norm(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / Cx::new(2f64.powi(squarings as i32), 0.0);
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..30 {
        term = &term * &scaled / Cx::new(k as f64, 0.0);
        sum += &term;
        if max_abs(&term) < 1e-18 * max_abs(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Eigenvalues from the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Vec<Cx> {
    // Plain QR iteration can cycle on matrices whose spectrum is a rotated
    // regular polygon (companion matrices of x^n - c). A complex shift of the
    // whole matrix breaks the symmetry without changing the eigenvectors.
    let n = m.nrows();
    let scale = max_abs(m).max(1.0);
    for shift in [Cx::new(0.0, 0.0), Cx::new(0.31, 0.17), Cx::new(-0.23, 0.41), Cx::new(0.57, -0.29)] {
        let c = shift * scale;
        let shifted = m + identity(n) * c;
        if let Some(schur) = shifted.try_schur(f64::EPSILON, 10_000) {
            let (_, t) = schur.unpack();
            return (0..n).map(|i| t[(i, i)] - c).collect();
        }
    }
    unreachable!("Schur iteration failed for every shift")
}

/// The unique eigenvector with eigenvalue `-1`, up to scale.
///
/// Errors when the number of eigenvalues within `tol` of `-1` differs from one.
/// The null vector of `M + 1` comes from an SVD and is polished by two steps
/// of inverse iteration.
pub fn eig_unit_minus(m: &CMatrix, tol: f64) -> Result<CVector> {
    let n = m.nrows();
    let evals = eigenvalues(m);
    let near: Vec<Cx> = evals.iter().copied().filter(|l| (l + 1.0).norm() < tol).collect();
    if near.len() != 1 {
        return Err(GmError::EigenAmbiguity { count: near.len() });
    }
    let mu = near[0];
    let shifted = m - identity(n) * mu;
    let svd = shifted.clone().svd(false, true);
    let v_t = svd.v_t.ok_or(GmError::SingularMatrix { cond: f64::INFINITY })?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &s)| if s < bv { (i, s) } else { (bi, bv) });
    let mut v: CVector = v_t.row(imin).adjoint();
    let polish = m - identity(n) * (mu + Cx::new(1e-9, 1e-9));
    let lu = polish.lu();
    for _ in 0..2 {
        match lu.solve(&v) {
            Some(x) if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                let s = max_abs_vec(&x);
                if s > 0.0 {
                    v = x / Cx::new(s, 0.0);
                }
            }
            _ => break,
        }
    }
    Ok(v)
}
