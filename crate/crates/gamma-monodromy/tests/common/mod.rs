//! Reference values computed from scratch, without the library's
//! characteristic-class or pairing code.
#![allow(dead_code)]

use std::f64::consts::PI;

use gamma_monodromy::numerics::{identity, inverse, CMatrix, CVector};
use gamma_monodromy::quantum::SSeries;
use num_complex::Complex64 as Cx;

pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// `binom(m + k, m)` as a polynomial in `k`.
pub fn hilbert_poly(m: usize, k: i64) -> f64 {
    (1..=m as i64).map(|i| (k + i) as f64 / i as f64).product()
}

/// Zeta by direct summation with an Euler-Maclaurin tail.
pub fn zeta(s: u32) -> f64 {
    let n = 2000usize;
    let head: f64 = (1..n).map(|k| (k as f64).powi(-(s as i32))).sum();
    let nf = n as f64;
    let s_f = s as f64;
    head + nf.powf(1.0 - s_f) / (s_f - 1.0) + 0.5 * nf.powf(-s_f) + s_f / 12.0 * nf.powf(-s_f - 1.0)
        - s_f * (s_f + 1.0) * (s_f + 2.0) / 720.0 * nf.powf(-s_f - 3.0)
}

/// Truncated power series in the hyperplane class of `P^m`, as coefficient vectors.
fn series_mul(a: &[Cx], b: &[Cx]) -> Vec<Cx> {
    let m = a.len();
    (0..m).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

fn series_exp(log: &[Cx]) -> Vec<Cx> {
    let m = log.len();
    let mut e = vec![Cx::new(0.0, 0.0); m];
    e[0] = log[0].exp();
    for i in 1..m {
        e[i] = (1..=i).map(|k| log[k] * k as f64 * e[i - k]).sum::<Cx>() / i as f64;
    }
    e
}

/// `Psi_q(O(k))` on `P^m` in the basis `1, p, ..., p^m`.
pub fn psi_proj(m: usize, k: i64, q_log: Cx) -> CVector {
    let n = (m + 1) as f64;
    let mut log = vec![Cx::new(0.0, 0.0); m + 1];
    if m >= 1 {
        // Gamma class, q factor and the twisted Chern character share one exponential.
        log[1] = Cx::new(-n * EULER_MASCHERONI, 0.0) - q_log + Cx::new(0.0, 2.0 * PI * k as f64);
    }
    for j in 2..=m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        log[j] = Cx::new(n * sign * zeta(j as u32) / j as f64, 0.0);
    }
    let v = series_exp(&log);
    let scale = (2.0 * PI).powf((1.0 - m as f64) / 2.0);
    CVector::from_iterator(m + 1, v.into_iter().map(|z| z * scale))
}

/// `(a|b)` on `P^m` from its definition, with `theta`, `rho` and the
/// Poincare pairing written out.
pub fn sym_pairing_proj(m: usize, a: &CVector, b: &CVector) -> Cx {
    let euler = |x: &CVector, y: &CVector| -> Cx {
        // exp(pi i rho) y: rho = (m+1) p
        let mut rho_pow = y.clone();
        let mut acc = y.clone();
        for j in 1..=m {
            let mut next = CVector::zeros(m + 1);
            for i in 0..m {
                next[i + 1] = rho_pow[i] * (m + 1) as f64;
            }
            rho_pow = next;
            let mut f = 1.0;
            for t in 1..=j {
                f *= t as f64;
            }
            acc += &rho_pow * (Cx::new(0.0, PI).powi(j as i32) / f);
        }
        let mut total = Cx::new(0.0, 0.0);
        for i in 0..=m {
            let theta = m as f64 / 2.0 - i as f64;
            total += x[m - i] * acc[i] * Cx::from_polar(1.0, PI * theta);
        }
        total / (2.0 * PI)
    };
    euler(a, b) + euler(b, a)
}

/// `x -> x - (alpha|x) alpha`.
pub fn reflection_proj(m: usize, alpha: &CVector) -> CMatrix {
    let mut out = CMatrix::zeros(m + 1, m + 1);
    for j in 0..=m {
        let mut e = CVector::zeros(m + 1);
        e[j] = Cx::new(1.0, 0.0);
        let col = &e - alpha * sym_pairing_proj(m, alpha, &e);
        out.set_column(j, &col);
    }
    out
}

pub fn vec_max(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn shift(size: usize) -> CMatrix {
    CMatrix::from_fn(size, size, |i, j| if i == j + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn eval(series: &SSeries, z: Cx) -> CMatrix {
    series.coeffs.iter().enumerate().fold(CMatrix::zeros(series.coeffs[0].nrows(), series.coeffs[0].ncols()), |acc, (k, m)| {
        acc + m * z.powi(-(k as i32))
    })
}

/// `sum_d q^d (P - dz)^i prod_{j<=d} (P - jz)^{-(m+1)} 1` evaluated with dense resolvents.
pub fn proj_oracle(m: usize, q: Cx, z: Cx, dmax: usize) -> CMatrix {
    let n = m + 1;
    let p = shift(n);
    let one = identity(n);
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        let mut col = CVector::zeros(n);
        let mut denom = identity(n);
        for d in 0..=dmax {
            if d > 0 {
                let r = inverse(&(&p - &one * (z * d as f64))).unwrap();
                for _ in 0..n {
                    denom = &denom * &r;
                }
            }
            let mut num = identity(n);
            for _ in 0..i {
                num = &num * (&p - &one * (z * d as f64));
            }
            col += (&num * &denom).column(0) * q.powi(d as i32);
        }
        out.set_column(i, &col);
    }
    out
}

/// The twisted columns in the ring `C[e]/e^n`, projected to `e, ..., e^{n-1}`.
pub fn twisted_oracle(n: usize, big_q: Cx, z: Cx, dmax: usize) -> CMatrix {
    let e = shift(n);
    let one = identity(n);
    let sign: f64 = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = CMatrix::zeros(n - 1, n - 1);
    for i in 1..n {
        let mut v = CVector::zeros(n);
        v[i] = c(1.0, 0.0);
        for d in 1..=dmax {
            let mut op = e.clone();
            for _ in 0..i {
                op = &op * (&e + &one * (z * d as f64));
            }
            for j in 1..d {
                op = &op * (&e + &one * (z * j as f64));
            }
            for j in 1..=d {
                let r = inverse(&(&e + &one * (z * j as f64))).unwrap();
                for _ in 0..n {
                    op = &op * &r;
                }
            }
            let coef = big_q.powi(-((d * (n - 1)) as i32)) * sign.powi(d as i32);
            v += op.column(0) * coef;
        }
        out.set_column(i - 1, &v.rows(1, n - 1).into_owned());
    }
    out
}

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}
