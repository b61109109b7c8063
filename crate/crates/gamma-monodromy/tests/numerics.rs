use std::f64::consts::PI;

use gamma_monodromy::numerics::special::{exp_integral_e1, gauss_legendre, log_gamma_jet};
use gamma_monodromy::numerics::{
    circle, expm, gamma, identity, log_gamma, max_abs, ode_continue, polygamma, recip_gamma_jet, BranchState,
    CMatrix, Jet, OdeOptions, PathPiece, PathSpec,
};
use num_complex::Complex64 as Cx;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

proptest! {
    #[test]
    fn gamma_matches_statrs_on_the_real_axis(x in 0.05f64..30.0) {
        let ours = gamma(c(x, 0.0)).unwrap();
        let theirs = statrs::function::gamma::gamma(x);
        prop_assert!((ours.re - theirs).abs() <= 1e-12 * theirs.abs(), "{x}: {ours} vs {theirs}");
        prop_assert!(ours.im.abs() <= 1e-12 * theirs.abs());
    }

    #[test]
    fn log_gamma_matches_statrs(x in 0.05f64..200.0) {
        let ours = log_gamma(c(x, 0.0)).unwrap().re;
        let theirs = statrs::function::gamma::ln_gamma(x);
        prop_assert!((ours - theirs).abs() <= 1e-12 * theirs.abs().max(1.0));
    }

    #[test]
    fn reflection_formula(re in -4.5f64..4.5, im in 0.05f64..3.0) {
        let z = c(re, im);
        let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap();
        let rhs = PI / (z * PI).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm());
    }

    #[test]
    fn polygamma_recurrence(k in 0usize..6, re in -3.7f64..10.0, im in 0.1f64..4.0) {
        let z = c(re, im);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let lhs = polygamma(k, z + 1.0).unwrap();
        let rhs = polygamma(k, z).unwrap() + sign * fact / z.powi(k as i32 + 1);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()), "k={k} z={z}: {lhs} vs {rhs}");
    }

    #[test]
    fn digamma_matches_statrs(x in 0.1f64..50.0) {
        let ours = polygamma(0, c(x, 0.0)).unwrap().re;
        let theirs = statrs::function::gamma::digamma(x);
        prop_assert!((ours - theirs).abs() <= 1e-11 * theirs.abs().max(1.0));
    }

    #[test]
    fn jet_exp_inverts_ln(a in 0.5f64..3.0, b in -2.0f64..2.0, d in -1.0f64..1.0) {
        let f = Jet::from_coeffs(vec![c(a, 0.2), c(b, 0.0), c(d, 0.5), c(0.1, -0.3)]);
        let back = f.ln().exp();
        for i in 0..4 {
            prop_assert!((back.coeffs[i] - f.coeffs[i]).norm() < 1e-12);
        }
        let one = &f * &f.recip();
        prop_assert!((one.coeffs[0] - 1.0).norm() < 1e-13);
        for i in 1..4 {
            prop_assert!(one.coeffs[i].norm() < 1e-12);
        }
    }
}

#[test]
fn recip_gamma_jet_derivatives() {
    // d/dz 1/Gamma = -psi/Gamma; d/dz log Gamma = psi, second derivative psi'.
    let z = c(2.3, 0.7);
    let j = recip_gamma_jet(z, 3).unwrap();
    let g = gamma(z).unwrap();
    assert!((j.coeffs[0] - 1.0 / g).norm() < 1e-13);
    assert!((j.coeffs[1] + polygamma(0, z).unwrap() / g).norm() < 1e-12);
    let lj = log_gamma_jet(z, 3).unwrap();
    assert!((lj.coeffs[1] - polygamma(0, z).unwrap()).norm() < 1e-12);
    assert!((lj.coeffs[2] * 2.0 - polygamma(1, z).unwrap()).norm() < 1e-12);
}

#[test]
fn recip_gamma_jet_at_a_pole_is_finite() {
    let j = recip_gamma_jet(c(-2.0, 0.0), 2).unwrap();
    assert!(j.coeffs[0].norm() < 1e-14);
    // 1/Gamma(-2 + w) = 2 w + O(w^2)
    assert!((j.coeffs[1] - 2.0).norm() < 1e-12);
}

#[test]
fn exponential_integral_reference_values() {
    // E1 by direct quadrature of exp(-x t)/t over t in [1, 800/x] with the
    // substitution t = exp(s).
    for x in [0.05f64, 0.5, 1.0, 3.0, 12.0] {
        let (nodes, weights) = gauss_legendre(40);
        let (a, b) = (0.0, (800.0 / x).ln());
        let mut quad = 0.0;
        for panel in 0..200 {
            let lo = a + (b - a) * panel as f64 / 200.0;
            let hi = a + (b - a) * (panel + 1) as f64 / 200.0;
            for (t, w) in nodes.iter().zip(&weights) {
                let s = 0.5 * (hi - lo) * t + 0.5 * (hi + lo);
                quad += 0.5 * (hi - lo) * w * (-x * s.exp()).exp();
            }
        }
        let e1 = exp_integral_e1(x);
        assert!((e1 - quad).abs() < 1e-12 * e1.max(1e-3), "x={x}: {e1} vs {quad}");
    }
}

#[test]
fn gauss_legendre_is_exact_for_polynomials() {
    let (x, w) = gauss_legendre(10);
    for p in 0..20 {
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
        let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p + 1) as f64 };
        assert!((approx - exact).abs() < 1e-14, "degree {p}");
    }
}

#[test]
fn expm_matches_power_series_for_small_matrices() {
    let a = CMatrix::from_row_slice(2, 2, &[c(0.1, 0.2), c(-0.3, 0.0), c(0.05, 0.1), c(0.2, -0.1)]);
    let mut term = identity(2);
    let mut sum = identity(2);
    for k in 1..40 {
        term = &term * &a / c(k as f64, 0.0);
        sum += &term;
    }
    assert!(max_abs(&(expm(&a) - sum)) < 1e-15);
    // exp(A) exp(-A) = 1
    assert!(max_abs(&(expm(&a) * expm(&(-&a)) - identity(2))) < 1e-14);
}

fn fuchsian(a: CMatrix) -> impl Fn(Cx, &CMatrix) -> gamma_monodromy::Result<CMatrix> {
    move |lambda: Cx, y: &CMatrix| Ok(&a * y / lambda)
}

fn sample_a() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.25, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)])
}

#[test]
fn ode_circle_gives_the_local_monodromy() {
    // Y' = A Y / lambda has Y = lambda^A; one loop multiplies by exp(2 pi i A).
    let a = sample_a();
    let path = circle(c(0.0, 0.0), 1.0, true);
    let start = BranchState::principal(c(1.0, 0.0)).unwrap();
    let opts = OdeOptions::new(1e-12, vec![c(0.0, 0.0)]);
    let out = ode_continue(fuchsian(a.clone()), &path, &identity(2), start, &opts).unwrap();
    let expect = expm(&(&a * c(0.0, 2.0 * PI)));
    assert!(max_abs(&(&out.y - &expect)) < 1e-9);
    assert!((out.branch.log_value - c(0.0, 2.0 * PI)).norm() < 1e-12);
}

#[test]
fn ode_continuation_composes_and_reverses() {
    let a = sample_a();
    let p = c(2.0, 0.0);
    let mid = c(0.5, 1.5);
    let end = c(-1.0, -0.5);
    let start = BranchState::principal(p).unwrap();
    let opts = OdeOptions::new(1e-12, vec![c(0.0, 0.0)]);
    let y0 = identity(2);
    let first = PathSpec::new(vec![PathPiece::Segment { from: p, to: mid }]).unwrap();
    let second = PathSpec::new(vec![PathPiece::Segment { from: mid, to: end }]).unwrap();
    let whole = PathSpec::new(vec![PathPiece::Segment { from: p, to: mid }, PathPiece::Segment { from: mid, to: end }]).unwrap();
    let o1 = ode_continue(fuchsian(a.clone()), &first, &y0, start, &opts).unwrap();
    let o2 = ode_continue(fuchsian(a.clone()), &second, &o1.y, o1.branch, &opts).unwrap();
    let ow = ode_continue(fuchsian(a.clone()), &whole, &y0, start, &opts).unwrap();
    assert!(max_abs(&(&o2.y - &ow.y)) < 1e-10);
    assert!((o2.branch.log_value - ow.branch.log_value).norm() < 1e-12);

    let back = PathSpec::new(vec![PathPiece::Segment { from: end, to: mid }, PathPiece::Segment { from: mid, to: p }]).unwrap();
    let ob = ode_continue(fuchsian(a), &back, &ow.y, ow.branch, &opts).unwrap();
    assert!(max_abs(&(&ob.y - &y0)) < 1e-10);
    assert!((ob.branch.log_value - start.log_value).norm() < 1e-12);
}

#[test]
fn branch_state_rejects_mismatched_log() {
    assert!(BranchState::new(c(1.0, 0.0), c(0.0, 2.0 * PI)).is_ok());
    assert!(BranchState::new(c(1.0, 0.0), c(0.0, 1.0)).is_err());
    assert!(BranchState::principal(c(0.0, 0.0)).is_err());
}
