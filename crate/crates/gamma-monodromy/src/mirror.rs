//! The function `Phi(q, lambda)` as a residue series and as a Mellin-Barnes
//! integral `G(q, lambda)`, its local behaviour at `u(q) = (n-1) q^{1/(n-1)}`,
//! the oscillatory integral `J(q)`, and the Laplace transform of `G`.
//!
//! On the vertical line `x = eps + i t` the integrand of `G` has modulus of
//! order `|t|^{-m-1/2}` (the exponential factors of the Gamma functions cancel),
//! so the truncation height is chosen from an algebraic tail bound. The other
//! contour integrals decay like `exp(-(n-1) pi |t| / 2)`.

use std::f64::consts::PI;

use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GmError, Result};
use crate::numerics::special::{exp_integral_e1, gauss_legendre, log_gamma_one_plus_coeffs, recip_gamma_jet_scaled};
use crate::numerics::{log_gamma, Jet};

const GL_POINTS: usize = 10;

/// `u(q) = (n-1) q^{1/(n-1)}` for real `q > 0`.
pub fn critical_value(n: usize, q: f64) -> f64 {
    let r = (n - 1) as f64;
    r * q.powf(1.0 / r)
}

fn check_args(n: usize, q: f64) -> Result<()> {
    if n < 3 {
        return Err(GmError::InvalidArgument("the mirror integrals need n >= 3".into()));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(GmError::InvalidArgument(format!("q = {q} must be positive")));
    }
    Ok(())
}

/// Shift `a = -n/2 + m - 1/2` in the exponent of `lambda`.
fn lambda_shift(n: usize, m: i64) -> f64 {
    -(n as f64) / 2.0 + m as f64 - 0.5
}

fn prefactor(n: usize) -> f64 {
    (2.0 * PI).powf((1.0 - n as f64) / 2.0)
}

/// Residue at `x = -d` of `q^{-x} Gamma(x)^{n-1} lambda^{a+(n-1)x} / Gamma(a+1+(n-1)x) dx/x`.
fn residue(n: usize, q: f64, m: i64, log_lambda: Cx, d: usize) -> Result<Cx> {
    let r = n - 1;
    let rf = r as f64;
    let pole = if d == 0 { n } else { r };
    let order = pole - 1;
    let a = lambda_shift(n, m);
    let df = d as f64;
    // Gamma(w - d) = Gamma(1 + w) / (w prod_{j=1}^d (w - j)); the factor w^{-(n-1)}
    // together with 1/x at d = 0 is the pole.
    // Magnitudes grow and shrink factorially in d; they are collected in
    // `log_scale` and applied once through the exponential factor.
    let lg: Vec<Cx> = log_gamma_one_plus_coeffs()[..=order].iter().map(|c| Cx::new(*c, 0.0)).collect();
    let mut g = Jet::from_coeffs(lg).exp();
    let mut log_scale = 0.0;
    for j in 1..=d {
        // 1 / (w - j) = -(1/j) / (1 - w/j)
        g = &g * &Jet::variable(Cx::new(-(j as f64), 0.0), order).recip().scale(Cx::new(j as f64, 0.0));
        log_scale -= (j as f64).ln();
    }
    let mut f = g.powi(r as u32);
    log_scale *= rf;
    if d > 0 {
        f = &f * &Jet::variable(Cx::new(-df, 0.0), order).recip().scale(Cx::new(df, 0.0));
        log_scale -= df.ln();
    }
    let (rg, rg_scale) = recip_gamma_jet_scaled(Cx::new(a + 1.0 - rf * df, 0.0), order)?;
    log_scale += rg_scale;
    // q^{d - w} lambda^{a - (n-1) d + (n-1) w}
    let mut expo = Jet::zero(order);
    expo.coeffs[0] = Cx::new(df * q.ln() + log_scale, 0.0) + (a - rf * df) * log_lambda;
    if order >= 1 {
        expo.coeffs[1] = Cx::new(-q.ln(), 0.0) + rf * log_lambda;
    }
    f = &f * &expo.exp();
    f = &f * &rg.rescale_variable(Cx::new(rf, 0.0));
    Ok(f.coeffs[order])
}

/// Partial sum `sum_{d=0}^{D}` of the residue series for `Phi(q, lambda)` with
/// the principal logarithm of `lambda`.
pub fn phi_residue_series(n: usize, q: f64, m: i64, lambda: Cx, max_degree: usize) -> Result<Cx> {
    check_args(n, q)?;
    let ll = lambda.ln();
    let mut acc = Cx::new(0.0, 0.0);
    for d in 0..=max_degree {
        acc += residue(n, q, m, ll, d)?;
    }
    Ok(acc * Cx::new(0.0, 2.0 * PI) * prefactor(n))
}

/// A residue-series value with the number of degrees summed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesValue {
    pub value: Cx,
    pub degrees: usize,
    pub last_term: f64,
}

/// Sum the residue series until five consecutive terms fall below `tol`
/// relative to the partial sum.
pub fn phi_residue_series_auto(n: usize, q: f64, m: i64, lambda: Cx, tol: f64, max_degree: usize) -> Result<SeriesValue> {
    check_args(n, q)?;
    if lambda.norm() <= critical_value(n, q) {
        return Err(GmError::OutsideConvergence { lambda, radius: critical_value(n, q) });
    }
    let ll = lambda.ln();
    let scale = Cx::new(0.0, 2.0 * PI) * prefactor(n);
    let mut acc = Cx::new(0.0, 0.0);
    let mut quiet = 0;
    for d in 0..=max_degree {
        let t = residue(n, q, m, ll, d)? * scale;
        acc += t;
        if t.norm() <= tol * acc.norm().max(1e-300) {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 5 {
            return Ok(SeriesValue { value: acc, degrees: d + 1, last_term: t.norm() });
        }
    }
    Err(GmError::NonConvergence { terms: max_degree + 1, last: f64::NAN })
}

/// Contour settings for the vertical-line integrals.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MBConfig {
    /// Abscissa of the contour.
    pub epsilon: f64,
    /// Half-height of the truncated contour.
    pub height: f64,
    /// Width of a Gauss-Legendre panel.
    pub quadrature_step: f64,
}

impl Default for MBConfig {
    fn default() -> Self {
        MBConfig { epsilon: 0.5, height: 2000.0, quadrature_step: 0.5 }
    }
}

impl MBConfig {
    pub fn with_height(height: f64) -> Self {
        MBConfig { height, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.height > 0.0 && self.quadrature_step > 0.0) {
            return Err(GmError::InvalidArgument("contour settings must be positive".into()));
        }
        Ok(())
    }
}

/// A contour integral with its estimated truncation tail.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContourValue {
    pub value: Cx,
    pub tail_bound: f64,
    pub panels: usize,
}

/// `int_0^T g(t) dt` by Gauss-Legendre panels, evaluated in parallel and summed
/// in panel order.
///
/// The integrands have a pole at `x = 0`, a distance `eps` from the start of
/// the line, so panel widths are capped at half the distance to it.
fn panel_integral<F>(height: f64, step: f64, eps: f64, g: F) -> (f64, usize)
where
    F: Fn(f64) -> f64 + Sync,
{
    let (nodes, weights) = gauss_legendre(GL_POINTS);
    let mut edges = vec![0.0];
    let mut t = 0.0;
    while t < height {
        let w = step.min(0.5 * eps.hypot(t));
        t = (t + w).min(height);
        edges.push(t);
    }
    let parts: Vec<f64> = edges
        .par_windows(2)
        .map(|e| {
            let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            nodes.iter().zip(&weights).map(|(x, w)| w * g(mid + half * x)).sum::<f64>() * half
        })
        .collect();
    (parts.iter().sum(), parts.len())
}

/// `log` of the Mellin-Barnes integrand (without `1/x`) at `x`.
fn mb_log_integrand(n: usize, q: f64, m: i64, log_lambda: f64, x: Cx) -> Result<Cx> {
    let rf = (n - 1) as f64;
    let a = lambda_shift(n, m);
    Ok(-x * q.ln() + rf * log_gamma(x)? + (a + rf * x) * log_lambda - log_gamma(a + 1.0 + rf * x)?)
}

/// `G(q, lambda) = (2 pi)^{(1-n)/2} int_{eps - i inf}^{eps + i inf} q^{-x} Gamma(x)^{n-1}
/// lambda^{a+(n-1)x} / Gamma(a+1+(n-1)x) dx/x` for real `lambda > 0`.
///
/// The integrand at `eps - i t` is the conjugate of the one at `eps + i t`, so
/// the value is `2 i` times the integral of the real part over `t > 0`.
pub fn phi_mellin_barnes(n: usize, q: f64, m: i64, lambda: Cx, cfg: &MBConfig) -> Result<ContourValue> {
    check_args(n, q)?;
    cfg.validate()?;
    if lambda.im != 0.0 || lambda.re <= 0.0 {
        return Err(GmError::InvalidArgument(format!("the contour integral diverges at lambda = {lambda}")));
    }
    if (m as f64) < 1.0 {
        return Err(GmError::InvalidArgument("the contour integral needs m >= 1".into()));
    }
    let ll = lambda.re.ln();
    let eps = cfg.epsilon;
    let integrand = |t: f64| -> f64 {
        let x = Cx::new(eps, t);
        match mb_log_integrand(n, q, m, ll, x) {
            Ok(l) => (l.exp() / x).re,
            Err(_) => f64::NAN,
        }
    };
    let (val, panels) = panel_integral(cfg.height, cfg.quadrature_step, eps, integrand);
    if !val.is_finite() {
        return Err(GmError::NonFinite("Mellin-Barnes integrand".into()));
    }
    // Stirling: |integrand| <= C t^{-m-1/2} beyond T, with C read off at T.
    let t = cfg.height;
    let x = Cx::new(eps, t);
    let at_t = (mb_log_integrand(n, q, m, ll, x)?.exp() / x).norm();
    let p = m as f64 - 0.5;
    let tail = 2.0 * prefactor(n) * at_t * t / p * 1.05;
    Ok(ContourValue { value: Cx::new(0.0, 2.0 * val * prefactor(n)), tail_bound: tail, panels })
}

/// Smallest height among `T0 * 2^k` whose algebraic tail bound is below `tol`.
pub fn mb_config_for(n: usize, q: f64, m: i64, lambda: f64, tol: f64) -> Result<MBConfig> {
    check_args(n, q)?;
    let ll = lambda.ln();
    let eps = MBConfig::default().epsilon;
    let p = m as f64 - 0.5;
    if p <= 0.0 {
        return Err(GmError::InvalidArgument("the contour integral needs m >= 1".into()));
    }
    let mut height = 250.0;
    while height < 1e6 {
        let x = Cx::new(eps, height);
        let at_t = (mb_log_integrand(n, q, m, ll, x)?.exp() / x).norm();
        if 2.0 * prefactor(n) * at_t * height / p * 1.05 < tol {
            return Ok(MBConfig::with_height(height));
        }
        height *= 2.0;
    }
    Err(GmError::NonConvergence { terms: 0, last: tol })
}

/// One point of the vanishing scan below `u(q)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZeroRegionSample {
    pub lambda: f64,
    pub value: Cx,
    pub tail_bound: f64,
}

/// `G(q, lambda)` on `count` equally spaced points of `(0, u(q)]`.
pub fn zero_region_scan(n: usize, q: f64, m: i64, count: usize, cfg: &MBConfig) -> Result<Vec<ZeroRegionSample>> {
    let u = critical_value(n, q);
    (1..=count)
        .map(|i| {
            let lambda = u * i as f64 / count as f64;
            let v = phi_mellin_barnes(n, q, m, Cx::new(lambda, 0.0), cfg)?;
            Ok(ZeroRegionSample { lambda, value: v.value, tail_bound: v.tail_bound })
        })
        .collect()
}

/// Least-squares fit of `log|G(u + s)| = c + k log s`.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Fit the local exponent of `G` at `u(q)` on a geometric grid
/// `s in [1e-3, 1e-1] u(q)`.
pub fn local_exponent_fit(n: usize, q: f64, m: i64, samples: usize) -> Result<ExponentFit> {
    check_args(n, q)?;
    if m < 1 || samples < 3 {
        return Err(GmError::InvalidArgument("the exponent fit needs m >= 1 and at least 3 samples".into()));
    }
    let u = critical_value(n, q);
    let (lo, hi) = (1e-3f64.ln(), 1e-1f64.ln());
    let mut pts = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp() * u;
        let lambda = u + s;
        let phi = phi_mellin_barnes(n, q, m, Cx::new(lambda, 0.0), &mb_config_for(n, q, m, lambda, 1e-13)?)?;
        let g = phi.value.norm();
        if g <= 0.0 {
            return Err(GmError::NonFinite("vanishing sample in the exponent fit".into()));
        }
        pts.push((s.ln(), g.ln()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    if r2 < 0.999 {
        return Err(GmError::PoorFit { r2 });
    }
    Ok(ExponentFit { exponent: slope, intercept: my - slope * mx, r_squared: r2, samples: pts })
}

/// `(1 / 2 pi i) int q^{-x} Gamma(x)^{n-1} dx` on the vertical line.
pub fn mellin_inversion_j(n: usize, q: f64, cfg: &MBConfig) -> Result<Cx> {
    check_args(n, q)?;
    cfg.validate()?;
    let rf = (n - 1) as f64;
    let eps = cfg.epsilon;
    let (val, _) = panel_integral(cfg.height, cfg.quadrature_step, eps, |t| {
        let x = Cx::new(eps, t);
        log_gamma(x).map(|lg| (-x * q.ln() + rf * lg).exp().re).unwrap_or(f64::NAN)
    });
    if !val.is_finite() {
        return Err(GmError::NonFinite("Mellin inversion integrand".into()));
    }
    Ok(Cx::new(val / PI, 0.0))
}

/// Height at which `exp(-(n-1) pi t / 2)` decay leaves less than `tol`.
fn exponential_height(n: usize, tol: f64) -> f64 {
    let rate = (n - 1) as f64 * PI / 2.0;
    (-(tol.ln()) / rate + 10.0).max(20.0)
}

/// `int_{eps - i inf}^{eps + i inf} q^{-x} Gamma(x)^{n-1} dx / x`.
pub fn contour_gamma_over_x(n: usize, q: f64, tol: f64) -> Result<Cx> {
    check_args(n, q)?;
    let rf = (n - 1) as f64;
    let eps = 0.5;
    let (val, _) = panel_integral(exponential_height(n, tol), 0.5, eps, |t| {
        let x = Cx::new(eps, t);
        log_gamma(x).map(|lg| ((-x * q.ln() + rf * lg).exp() / x).re).unwrap_or(f64::NAN)
    });
    Ok(Cx::new(0.0, 2.0 * val))
}

/// Tensor Gauss-Legendre rule on `[a, b]^dim` with panels of width `step`.
fn box_rule(a: f64, b: f64, step: f64) -> Vec<(f64, f64)> {
    let (nodes, weights) = gauss_legendre(GL_POINTS);
    let panels = ((b - a) / step).ceil() as usize;
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * GL_POINTS);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in nodes.iter().zip(&weights) {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Integration window in `log x` coordinates for `exp(-x - q/x)`-type integrands.
fn log_window(q: f64) -> (f64, f64) {
    (q.ln() - 8.0, 4.5)
}

/// `J(q) = int_{R_{>0}^{n-2}} exp(-(x_1 + ... + x_{n-2} + q/(x_1 ... x_{n-2}))) dx / (x_1 ... x_{n-2})`
/// by quadrature in `t_i = log x_i`, for `n` in `{3, 4}`.
pub fn oscillatory_j(n: usize, q: f64) -> Result<f64> {
    oscillatory_family(n, q, |k| (-k).exp())
}

/// `pi int_1^inf J(q u) du/u`, the left side of the oscillatory identity,
/// using `int_1^inf exp(-K u) du/u = E1(K)`.
pub fn oscillatory_u_integral(n: usize, q: f64) -> Result<f64> {
    Ok(PI * oscillatory_family(n, q, exp_integral_e1)?)
}

fn oscillatory_family(n: usize, q: f64, kernel: impl Fn(f64) -> f64 + Sync) -> Result<f64> {
    check_args(n, q)?;
    let (a, b) = log_window(q);
    let rule = box_rule(a, b, 0.25);
    match n {
        3 => Ok(rule
            .iter()
            .map(|(t, w)| {
                let x = t.exp();
                let k = q / x;
                if x > 700.0 || k > 700.0 {
                    0.0
                } else {
                    w * (-x).exp() * kernel(k)
                }
            })
            .sum()),
        4 => {
            let rows: Vec<f64> = rule
                .par_iter()
                .map(|(t1, w1)| {
                    let x1 = t1.exp();
                    rule.iter()
                        .map(|(t2, w2)| {
                            let x2 = t2.exp();
                            let k = q / (x1 * x2);
                            if x1 + x2 > 700.0 || k > 700.0 {
                                0.0
                            } else {
                                w2 * (-(x1 + x2)).exp() * kernel(k)
                            }
                        })
                        .sum::<f64>()
                        * w1
                })
                .collect();
            Ok(rows.iter().sum())
        }
        _ => Err(GmError::InvalidArgument(format!("direct quadrature supports n in {{3, 4}}, got {n}"))),
    }
}

/// Both sides of `2 i pi int_1^inf J(q u) du/u = int q^{-x} Gamma(x)^{n-1} dx/x`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OscillatoryCheck {
    pub n: usize,
    pub q: f64,
    pub oscillatory: Cx,
    pub contour: Cx,
    pub difference: f64,
}

pub fn oscillatory_check(n: usize, q: f64) -> Result<OscillatoryCheck> {
    let oscillatory = Cx::new(0.0, 2.0 * oscillatory_u_integral(n, q)?);
    let contour = contour_gamma_over_x(n, q, 1e-14)?;
    Ok(OscillatoryCheck { n, q, oscillatory, contour, difference: (oscillatory - contour).norm() })
}

/// Both sides of the Laplace identity at one value of `s`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LaplaceSample {
    pub s: f64,
    pub transform: Cx,
    pub contour: Cx,
    pub relative_difference: f64,
}

/// `int_{u(q)}^{inf} exp(-lambda s) G(q, lambda) dlambda` against
/// `(2 pi)^{(1-n)/2} int q^{-x} Gamma(x)^{n-1} s^{n/2-(n-1)x-m-1/2} dx/x`.
///
/// The left side substitutes `lambda = u + v^2`, which turns the
/// `(lambda - u)^{m - 1/2}` onset into a smooth function of `v`.
pub fn laplace_spot_check(n: usize, q: f64, m: i64, s_grid: &[f64], tol: f64) -> Result<Vec<LaplaceSample>> {
    check_args(n, q)?;
    let u = critical_value(n, q);
    let rf = (n - 1) as f64;
    let cfg = MBConfig::with_height(2000.0);
    s_grid
        .iter()
        .map(|&s| {
            if !(s > 0.0) {
                return Err(GmError::InvalidArgument("Laplace variable must be positive".into()));
            }
            // exp(-s (lambda - u)) below tol^2 beyond the cut.
            let vmax = ((-2.0 * tol.ln() + 10.0) / s).sqrt();
            let rule = box_rule(0.0, vmax, vmax / 24.0);
            let vals: Vec<Result<Cx>> = rule
                .par_iter()
                .map(|(v, w)| {
                    let lambda = u + v * v;
                    if *v == 0.0 {
                        return Ok(Cx::new(0.0, 0.0));
                    }
                    let g = phi_mellin_barnes(n, q, m, Cx::new(lambda, 0.0), &cfg)?.value;
                    Ok(g * (-lambda * s).exp() * (2.0 * v * w))
                })
                .collect();
            let mut transform = Cx::new(0.0, 0.0);
            for v in vals {
                transform += v?;
            }
            let eps = 0.5;
            let expo = n as f64 / 2.0 - m as f64 - 0.5;
            let (val, _) = panel_integral(exponential_height(n, 1e-14), 0.5, eps, |t| {
                let x = Cx::new(eps, t);
                log_gamma(x)
                    .map(|lg| ((-x * q.ln() + rf * lg + (expo - rf * x) * s.ln()).exp() / x).re)
                    .unwrap_or(f64::NAN)
            });
            let contour = Cx::new(0.0, 2.0 * val * prefactor(n));
            let relative_difference = (transform - contour).norm() / contour.norm().max(1e-300);
            Ok(LaplaceSample { s, transform, contour, relative_difference })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_contour_agree_for_p1_mirror() {
        let lambda = Cx::new(5.0, 0.0);
        let series = phi_residue_series_auto(3, 1.0, 3, lambda, 1e-16, 400).unwrap();
        let cfg = mb_config_for(3, 1.0, 3, 5.0, 1e-9).unwrap();
        let mb = phi_mellin_barnes(3, 1.0, 3, lambda, &cfg).unwrap();
        assert!((series.value - mb.value).norm() < 1e-6, "{} vs {}", series.value, mb.value);
    }

    #[test]
    fn contour_vanishes_below_critical_value() {
        let cfg = mb_config_for(3, 1.0, 3, 1.0, 1e-8).unwrap();
        let v = phi_mellin_barnes(3, 1.0, 3, Cx::new(1.0, 0.0), &cfg).unwrap();
        assert!(v.value.norm() < 1e-6, "{}", v.value);
    }

    #[test]
    fn mellin_inversion_reproduces_bessel_integral() {
        // n = 3: J(q) = int_0^inf exp(-x - q/x) dx/x
        let j = oscillatory_j(3, 1.0).unwrap();
        let mi = mellin_inversion_j(3, 1.0, &MBConfig::with_height(40.0)).unwrap();
        assert!((mi.re - j).abs() < 1e-10, "{} vs {}", mi.re, j);
    }
}
