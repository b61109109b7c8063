//! Two-parameter calibration of `Bl P^n` for `n >= 3`.
//!
//! With `p1 = h - e`, `p2 = h` and Novikov variables `q1, q2` dual to them,
//! the small J-function is
//!
//! ```text
//! J = sum_{d1,d2 >= 0} q1^d1 q2^d2  prod_{m=1}^{d1} (p1 - mz)^{-n}
//!                                   prod_{m=1}^{d2} (p2 - mz)^{-1}  F_{d2-d1}(e, z)
//! ```
//!
//! where `F_k = prod_{m=1}^{k} (e - mz)^{-1}` for `k >= 0` and
//! `F_k = prod_{m=k+1}^{0} (e - mz)` for `k < 0`. Since the first Chern class
//! is `2 p2 + (n-1) p1` and `n >= 3`, the mirror map is trivial and `J = S^{-1} 1`.
//! The remaining columns `S^{-1} phi` follow from the divisor operators
//! `A_h = -z q2 d/dq2 + h` and `A_e = -z (q2 d/dq2 - q1 d/dq1) + e`, which
//! satisfy `A_x S^{-1} phi = S^{-1} (x bullet phi)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::cohomology::SpaceModel;
use crate::error::{GmError, Result};

/// Laurent polynomial in `z` with vector coefficients, keyed by the power of `z`.
type Laurent = BTreeMap<i32, DVector<f64>>;
/// Power series in `(q1, q2)` with Laurent coefficients.
type QLaurent = BTreeMap<(usize, usize), Laurent>;

fn add_into(dst: &mut Laurent, pow: i32, v: &DVector<f64>) {
    match dst.get_mut(&pow) {
        Some(x) => *x += v,
        None => {
            dst.insert(pow, v.clone());
        }
    }
}

/// A Laurent polynomial of commuting operators `sum_k M_k z^k`.
struct LaurentOp {
    terms: Vec<(i32, DMatrix<f64>)>,
}

impl LaurentOp {
    fn apply(&self, v: &Laurent, min_pow: i32) -> Laurent {
        let mut out = Laurent::new();
        for (p, x) in v {
            for (k, m) in &self.terms {
                let pw = p + k;
                if pw >= min_pow {
                    add_into(&mut out, pw, &(m * x));
                }
            }
        }
        out.retain(|_, x| x.amax() > 0.0);
        out
    }
}

/// The columns `S^{-1}(z) phi_j` of `Bl P^n` through `q1^dmax q2^dmax` and `z^{-order}`.
#[derive(Debug, Clone)]
pub struct BlowupCalibration {
    pub n: usize,
    pub dmax: usize,
    pub order: usize,
    pub space: SpaceModel,
    columns: Vec<BTreeMap<(usize, usize), Laurent>>,
    /// Largest positive-`z` remainder met while applying divisor operators.
    pub positive_power_residual: f64,
}

impl BlowupCalibration {
    /// Coefficient of `q1^d1 q2^d2 z^{-j}` in `S^{-1} phi_col`.
    pub fn coefficient(&self, col: usize, d1: usize, d2: usize, j: usize) -> DVector<f64> {
        self.columns[col]
            .get(&(d1, d2))
            .and_then(|l| l.get(&-(j as i32)))
            .cloned()
            .unwrap_or_else(|| DVector::zeros(self.space.rank()))
    }

    pub fn rank(&self) -> usize {
        self.space.rank()
    }
}

fn inverse_linear(x: &DMatrix<f64>, m: f64, nil: usize) -> LaurentOp {
    // (x - m z)^{-1} = -sum_j x^j m^{-j-1} z^{-j-1}
    let size = x.nrows();
    let mut terms = Vec::new();
    let mut pw = DMatrix::identity(size, size);
    for j in 0..=nil {
        terms.push((-(j as i32) - 1, &pw * (-(m.powi(-(j as i32) - 1)))));
        pw = &pw * x;
    }
    LaurentOp { terms }
}

fn linear(x: &DMatrix<f64>, m: f64) -> LaurentOp {
    // x - m z
    let size = x.nrows();
    LaurentOp { terms: vec![(0, x.clone()), (1, DMatrix::identity(size, size) * (-m))] }
}

fn j_term(space: &SpaceModel, n: usize, d1: usize, d2: usize, min_pow: i32) -> Laurent {
    let size = space.rank();
    let real = |c: &nalgebra::DMatrix<num_complex::Complex64>| c.map(|z| z.re);
    let h = real(&space.cup_matrix(&space.basis_vector(1)));
    let e = real(&space.cup_matrix(&space.basis_vector(n + 1)));
    let p1 = &h - &e;
    let nil = 2 * n + 1;
    let mut v = Laurent::new();
    let mut unit = DVector::zeros(size);
    unit[0] = 1.0;
    v.insert(0, unit);
    let k = d2 as i64 - d1 as i64;
    // Polynomial factors first so truncation never discards terms that a
    // later positive power of z would lift back.
    if k < 0 {
        for m in (k + 1)..=0 {
            v = linear(&e, m as f64).apply(&v, i32::MIN);
        }
    }
    for m in 1..=d1 {
        let op = inverse_linear(&p1, m as f64, nil);
        for _ in 0..n {
            v = op.apply(&v, min_pow);
        }
    }
    for m in 1..=d2 {
        v = inverse_linear(&h, m as f64, nil).apply(&v, min_pow);
    }
    if k > 0 {
        for m in 1..=k {
            v = inverse_linear(&e, m as f64, nil).apply(&v, min_pow);
        }
    }
    v
}

/// `(A v)_d = -z c(d) v_d + x v_d` for the divisor operator with weight `c(d)`.
fn apply_divisor(x: &DMatrix<f64>, weight: impl Fn(usize, usize) -> f64, v: &QLaurent) -> QLaurent {
    let mut out = QLaurent::new();
    for (&(d1, d2), lau) in v {
        let mut l = Laurent::new();
        let c = weight(d1, d2);
        for (p, vec) in lau {
            add_into(&mut l, *p, &(x * vec));
            if c != 0.0 {
                add_into(&mut l, p + 1, &(vec * (-c)));
            }
        }
        out.insert((d1, d2), l);
    }
    out
}

/// Build the calibration columns for `Bl P^n`, `n >= 3`.
pub fn blowup_calibration(n: usize, dmax: usize, order: usize) -> Result<BlowupCalibration> {
    if n < 3 {
        return Err(GmError::InvalidArgument("the two-parameter J-function needs n >= 3".into()));
    }
    let space = SpaceModel::bl_proj(n)?;
    let size = space.rank();
    let min_pow = -((order + n + 2) as i32);
    let mut j: QLaurent = QLaurent::new();
    for d1 in 0..=dmax {
        for d2 in 0..=dmax {
            j.insert((d1, d2), j_term(&space, n, d1, d2, min_pow));
        }
    }
    let real = |c: &nalgebra::DMatrix<num_complex::Complex64>| c.map(|z| z.re);
    let h = real(&space.cup_matrix(&space.basis_vector(1)));
    let e = real(&space.cup_matrix(&space.basis_vector(n + 1)));

    let mut columns: Vec<Option<QLaurent>> = vec![None; size];
    columns[0] = Some(j);
    let mut positive_residual: f64 = 0.0;
    // Process by degree: h^deg from h^{deg-1}, e^deg from e^{deg-1}.
    for deg in 1..=n {
        let mut jobs = vec![(deg, deg - 1, true)];
        if deg < n {
            let prev_e = if deg == 1 { 0 } else { n + deg - 1 };
            jobs.push((n + deg, prev_e, false));
        }
        for (target, source, is_h) in jobs {
            let src = columns[source].as_ref().expect("lower degree done");
            let w = if is_h {
                apply_divisor(&h, |_, d2| d2 as f64, src)
            } else {
                apply_divisor(&e, |d1, d2| d2 as f64 - d1 as f64, src)
            };
            // The z^0 part is the quantum product x bullet phi_source; positive
            // powers of z must cancel.
            let mut result = w.clone();
            for lau in result.values_mut() {
                let pos: Vec<i32> = lau.keys().copied().filter(|p| *p > 0).collect();
                for p in pos {
                    positive_residual = positive_residual.max(lau[&p].amax());
                    lau.remove(&p);
                }
            }
            for (&(c1, c2), lau) in &w {
                let Some(x) = lau.get(&0) else { continue };
                for b in 0..size {
                    let coef = x[b];
                    if b == target || coef.abs() < 1e-13 {
                        continue;
                    }
                    if (c1, c2) == (0, 0) {
                        return Err(GmError::NonFinite(format!("unexpected classical term in column {target}")));
                    }
                    let col_b = columns[b]
                        .as_ref()
                        .ok_or_else(|| GmError::NonFinite(format!("column {b} needed before it is known")))?;
                    for (&(e1, e2), lb) in col_b {
                        let (t1, t2) = (e1 + c1, e2 + c2);
                        if t1 > dmax || t2 > dmax {
                            continue;
                        }
                        let dst = result.entry((t1, t2)).or_default();
                        for (p, vec) in lb {
                            if *p <= 0 {
                                add_into(dst, *p, &(vec * (-coef)));
                            }
                        }
                    }
                }
                if (c1, c2) != (0, 0) && x[target].abs() > 1e-12 {
                    return Err(GmError::NonFinite(format!("quantum correction to the leading class of column {target}")));
                }
            }
            // Later divisor operators raise powers of z, so keep the headroom until every column is built.
            for lau in result.values_mut() {
                lau.retain(|p, v| *p >= min_pow && v.amax() > 1e-300);
            }
            columns[target] = Some(result);
        }
    }
    let columns = columns
        .into_iter()
        .map(|c| {
            let mut c = c.expect("all columns built");
            for lau in c.values_mut() {
                lau.retain(|p, _| *p >= -(order as i32));
            }
            c
        })
        .collect();
    Ok(BlowupCalibration { n, dmax, order, space, columns, positive_power_residual: positive_residual })
}
