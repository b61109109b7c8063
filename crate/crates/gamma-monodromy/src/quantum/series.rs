//! Closed-form calibrations `S(z)^{-1}` as series in `1/z`.
//!
//! Every degree-`d` summand is a rational function of `z` and a nilpotent
//! class. Writing `w = 1/z` and `y = (class) * w` turns it into
//! `w^N f(y)` with `f` a polynomial truncated at the nilpotency order, which
//! the jet type expands exactly.

use num_complex::Complex64 as Cx;

use crate::cohomology::{SpaceKind, SpaceModel};
use crate::error::Result;
use crate::numerics::{identity, max_abs, CMatrix, CVector, Jet};
use crate::quantum::product::quantum_mult_twisted;

/// A truncated operator series `sum_k coeffs[k] z^{-k}`.
#[derive(Debug, Clone)]
pub struct SSeries {
    pub space: SpaceKind,
    pub param: Cx,
    pub coeffs: Vec<CMatrix>,
}

impl SSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn identity(space: SpaceKind, rank: usize, order: usize) -> Self {
        let mut coeffs = vec![CMatrix::zeros(rank, rank); order + 1];
        coeffs[0] = identity(rank);
        SSeries { space, param: Cx::new(0.0, 0.0), coeffs }
    }

    /// Largest entry of the coefficients of `self(z) other(z) - 1` through `z^{-K}`.
    pub fn product_defect(&self, other: &SSeries) -> f64 {
        let k = self.order().min(other.order());
        let n = self.coeffs[0].nrows();
        let mut worst: f64 = 0.0;
        for total in 0..=k {
            let mut acc = CMatrix::zeros(n, n);
            for a in 0..=total {
                acc += &self.coeffs[a] * &other.coeffs[total - a];
            }
            if total == 0 {
                acc -= identity(n);
            }
            worst = worst.max(max_abs(&acc));
        }
        worst
    }
}

/// Coefficient vectors of `S(q,z)^{-1} p^i` on `H(P^m)`, indexed by the power of `1/z`:
/// `p^i + sum_d q^d (p - dz)^i / prod_{j=1}^d (p - jz)^{m+1}`.
pub fn s_inverse_proj_column(m: usize, q: Cx, i: usize, order: usize) -> Vec<CVector> {
    let n = m + 1;
    let mut out = vec![CVector::zeros(n); order + 1];
    out[0][i] = Cx::new(1.0, 0.0);
    let mut denom = Jet::constant(Cx::new(1.0, 0.0), m);
    let mut qd = Cx::new(1.0, 0.0);
    let mut d = 1usize;
    // Summand d starts at w^{d(m+1) - i}.
    while d * n <= order + i {
        qd *= q;
        let inv = Jet::variable(Cx::new(-(d as f64), 0.0), m).recip().powi(n as u32);
        denom = &denom * &inv;
        let num = Jet::variable(Cx::new(-(d as f64), 0.0), m).powi(i as u32);
        let f = &num * &denom;
        let base = d * n - i;
        for (k, c) in f.coeffs.iter().enumerate() {
            let pw = base + k;
            if pw <= order {
                out[pw][k] += qd * c;
            }
        }
        d += 1;
    }
    out
}

fn columns_to_series(space: SpaceKind, param: Cx, cols: Vec<Vec<CVector>>, order: usize) -> SSeries {
    let rank = cols.len();
    let coeffs = (0..=order)
        .map(|k| {
            let mut mat = CMatrix::zeros(rank, rank);
            for (j, col) in cols.iter().enumerate() {
                mat.set_column(j, &col[k]);
            }
            mat
        })
        .collect();
    SSeries { space, param, coeffs }
}

/// `S(q,z)^{-1}` on `H(P^m)` through `z^{-K}`.
pub fn s_inverse_proj(m: usize, q: Cx, order: usize) -> SSeries {
    let cols = (0..=m).map(|i| s_inverse_proj_column(m, q, i, order)).collect();
    columns_to_series(SpaceKind::Proj(m), q, cols, order)
}

/// Shared expansion of `(-1)^{dn} Q^{-d(n-1)} y (d+y)^{s} prod_{j<d} (j+y) / prod_{j<=d} (j+y)^n`.
fn exceptional_summand(n: usize, d: usize, extra: usize, order_y: usize) -> Jet {
    let mut f = Jet::variable(Cx::new(0.0, 0.0), order_y);
    for j in 1..=d {
        let lin = Jet::variable(Cx::new(j as f64, 0.0), order_y);
        let inv = lin.recip();
        f = &f * &inv.powi(n as u32);
        if j < d {
            f = &f * &lin;
        }
    }
    let dy = Jet::variable(Cx::new(d as f64, 0.0), order_y);
    &f * &dy.powi(extra as u32)
}

/// Coefficient vectors of `twS(Q,z)^{-1} e^i` in the basis `e, ..., e^{n-1}`.
pub fn s_inverse_twisted_column(n: usize, big_q: Cx, i: usize, order: usize) -> Vec<CVector> {
    let r = n - 1;
    let mut out = vec![CVector::zeros(r); order + 1];
    out[0][i - 1] = Cx::new(1.0, 0.0);
    let qstep = big_q.powi(-(r as i32)) * if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut coef = Cx::new(1.0, 0.0);
    let mut d = 1usize;
    while d * r <= order + i {
        coef *= qstep;
        let f = exceptional_summand(n, d, i, r);
        // y^k is e^k w^k; the summand is w^{(n-1)d - i} f(y).
        for k in 1..=r {
            let pw = d * r + k;
            if pw < i {
                continue;
            }
            let pw = pw - i;
            if pw <= order {
                out[pw][k - 1] += coef * f.coeffs[k];
            }
        }
        d += 1;
    }
    out
}

/// `twS(Q,z)^{-1}` on the reduced cohomology of the exceptional divisor.
pub fn s_inverse_twisted(n: usize, big_q: Cx, order: usize) -> SSeries {
    let cols = (1..n).map(|i| s_inverse_twisted_column(n, big_q, i, order)).collect();
    columns_to_series(SpaceKind::TwistedE(n), big_q, cols, order)
}

/// The restriction of `S^{-1} 1` of `Bl P^n` to curve classes inside the
/// exceptional divisor, with Novikov variable `q1 = Q^{-(n-1)}`, in the
/// blowup basis.
pub fn s_inverse_blowup_unit(n: usize, q1: Cx, order: usize) -> Result<Vec<CVector>> {
    let space = SpaceModel::bl_proj(n)?;
    let size = space.rank();
    let mut out = vec![CVector::zeros(size); order + 1];
    out[0][0] = Cx::new(1.0, 0.0);
    let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
    let sign_top = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let r = n - 1;
    let mut coef = Cx::new(1.0, 0.0);
    let mut d = 1usize;
    while d * r <= order {
        coef *= q1 * sign_n;
        let f = exceptional_summand(n, d, 0, n);
        for k in 1..=n {
            let pw = d * r + k;
            if pw > order {
                break;
            }
            if k < n {
                out[pw][n + k] += coef * f.coeffs[k];
            } else {
                out[pw][n] += coef * f.coeffs[k] * sign_top;
            }
        }
        d += 1;
    }
    Ok(out)
}

/// `S_k = (-1)^k (S^{-1}_k)^dagger`, the adjoint taken for the pairing of the
/// space, which is the coefficientwise form of `S(z)^{-1} = S(-z)^T`.
pub fn s_from_inverse(sinv: &SSeries, space: &SpaceModel) -> SSeries {
    let coeffs = sinv
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let adj = space.adjoint(c);
            if k % 2 == 0 { adj } else { -adj }
        })
        .collect();
    SSeries { space: sinv.space, param: sinv.param, coeffs }
}

/// Largest coefficient of `S(z) S(-z)^dagger - 1` through the truncation order.
pub fn symplectic_defect(s: &SSeries, space: &SpaceModel) -> f64 {
    let flipped = SSeries {
        space: s.space,
        param: s.param,
        coeffs: s
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let adj = space.adjoint(c);
                if k % 2 == 0 { adj } else { -adj }
            })
            .collect(),
    };
    s.product_defect(&flipped)
}

fn twisted_calibration(n: usize, big_q: Cx, order: usize) -> Result<(SpaceModel, SSeries)> {
    let space = SpaceModel::twisted_e(n)?;
    let s = s_from_inverse(&s_inverse_twisted(n, big_q, order), &space);
    Ok((space, s))
}

/// Exponent of `Q` carried by entry `(i, j)` of the twisted `S_l`.
fn twisted_exponent(space: &SpaceModel, l: usize, i: usize, j: usize) -> i32 {
    (-(l as f64) - space.theta[(i, i)].re + space.theta[(j, j)].re).round() as i32
}

/// Largest `|S_l(2Q)_ij - 2^a S_l(Q)_ij|` over `l <= order`, with
/// `a = -l - theta_i + theta_j`. Zero exactly when every entry is the pure
/// power of `Q` that the grading predicts.
pub fn twisted_homogeneity_defect(n: usize, big_q: Cx, order: usize) -> Result<f64> {
    let (space, s1) = twisted_calibration(n, big_q, order)?;
    let (_, s2) = twisted_calibration(n, big_q * 2.0, order)?;
    let r = space.rank();
    let mut worst: f64 = 0.0;
    for l in 0..=order {
        for i in 0..r {
            for j in 0..r {
                let a = twisted_exponent(&space, l, i, j);
                worst = worst.max((s2.coeffs[l][(i, j)] - s1.coeffs[l][(i, j)] * 2f64.powi(a)).norm());
            }
        }
    }
    Ok(worst)
}

/// Largest entry of `Q dS_l/dQ - (n-1) e S_{l-1} - S_{l-1} rho` for
/// `1 <= l <= order`, with `e` the quantum product by `e` and the `Q`
/// derivative taken from the homogeneity exponents.
pub fn twisted_divisor_defect(n: usize, big_q: Cx, order: usize) -> Result<f64> {
    let (space, s) = twisted_calibration(n, big_q, order)?;
    let e = quantum_mult_twisted(n, big_q)?.generator;
    let r = space.rank();
    let mut worst: f64 = 0.0;
    for l in 1..=order {
        let qd = CMatrix::from_fn(r, r, |i, j| s.coeffs[l][(i, j)] * twisted_exponent(&space, l, i, j) as f64);
        let rhs = &e * &s.coeffs[l - 1] * Cx::new((n - 1) as f64, 0.0) + &s.coeffs[l - 1] * &space.rho;
        worst = worst.max(max_abs(&(qd - rhs)));
    }
    Ok(worst)
}
