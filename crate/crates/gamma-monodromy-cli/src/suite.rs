//! `suite`: run the library invariants and report one entry per item.

use gamma_monodromy::cohomology::{euler_pairing, hrr_chi, psi_map, KClass, SpaceModel};
use gamma_monodromy::gathmann::crosscheck_against_bls;
use gamma_monodromy::mirror::{
    critical_value, laplace_spot_check, local_exponent_fit, mb_config_for, oscillatory_check, phi_mellin_barnes,
    phi_residue_series_auto, zero_region_scan,
};
use gamma_monodromy::monodromy::{composition_defect, proj_reflection, twisted_reflection_check};
use gamma_monodromy::numerics::BranchState;
use gamma_monodromy::periods::twisted_projective_defect;
use gamma_monodromy::quantum::{
    s_from_inverse, s_inverse_proj, s_inverse_twisted, symplectic_defect, twisted_divisor_defect,
    twisted_homogeneity_defect,
};
use gamma_monodromy::GmError;
use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use serde::Serialize;

use crate::report::{cx, Check, Envelope};

/// Names accepted by `--only`, in report order.
pub const ITEMS: &[&str] =
    &["pairing", "reflections", "twisted", "period-identity", "recursions", "composition", "mirror", "gathmann"];

/// Integration tolerance for the continuation items.
const ODE_TOL: f64 = 1e-12;
/// Tighter tolerance for the reflections, whose involution check at level
/// `-n` sits close to the rounding floor.
const REFLECTION_TOL: f64 = 1e-13;

#[derive(Debug, Serialize)]
pub struct ItemReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub items: Vec<ItemReport>,
}

type ItemResult = Result<Vec<Check>, GmError>;

fn pairing() -> ItemResult {
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 3..=6usize {
        let space = SpaceModel::proj(n - 2);
        let ql = [Cx::new(0.0, 0.0)];
        for i in 0..=(n - 2) as i64 {
            for j in 0..=(n - 2) as i64 {
                let a = psi_map(&KClass::o(i), &space, &ql)?;
                let b = psi_map(&KClass::o(j), &space, &ql)?;
                let chi = hrr_chi(&KClass::o(i), &KClass::o(j), &space)?;
                worst = worst.max((euler_pairing(&space, &a, &b) - chi).norm());
            }
        }
    }
    checks.push(Check::below("max |<Psi(O(i)), Psi(O(j))> - chi(O(j-i))|, n <= 6", worst, 1e-9));
    let mut worst_e: f64 = 0.0;
    for n in 3..=5usize {
        let bl = SpaceModel::bl_proj(n)?;
        let ql = [Cx::new(0.0, 0.0), Cx::new(0.0, 0.0)];
        let v = psi_map(&KClass::o_exceptional(0), &bl, &ql)?;
        worst_e = worst_e.max((euler_pairing(&bl, &v, &v) - 1.0).norm());
    }
    checks.push(Check::below("max |<Psi(O_E), Psi(O_E)> - 1|, n = 3..5", worst_e, 1e-10));
    Ok(checks)
}

fn reflections() -> ItemResult {
    let mut checks = Vec::new();
    for n in 3..=5usize {
        let reports = (0..=n - 2)
            .into_par_iter()
            .map(|k| proj_reflection(n, Cx::new(0.0, 0.0), k, n as i64, REFLECTION_TOL))
            .collect::<Result<Vec<_>, _>>()?;
        let max = |f: &dyn Fn(&gamma_monodromy::monodromy::ProjReflectionReport) -> f64| {
            reports.iter().map(f).fold(0.0, f64::max)
        };
        checks.push(Check::below(format!("n={n}: max |alpha - sign*Psi(O(k))|"), max(&|r| r.residual), 1e-5));
        checks.push(Check::below(
            format!("n={n}: max |(alpha|alpha) - 2|"),
            max(&|r| (r.reflection.self_pairing - 2.0).norm()),
            1e-6,
        ));
        checks.push(Check::below(format!("n={n}: max |det C + 1|"), max(&|r| r.monodromy.residuals.determinant), 1e-6));
        checks.push(Check::below(format!("n={n}: max |C^2 - 1|"), max(&|r| r.monodromy.residuals.involution), 1e-6));
    }
    Ok(checks)
}

fn twisted() -> ItemResult {
    let mut checks = Vec::new();
    for n in 3..=4usize {
        for k in 0..=n - 2 {
            let r = twisted_reflection_check(n, 1.0, k, n as i64, ODE_TOL)?;
            let c = r.constant;
            let dist = (c - 1.0).norm().min((c + 1.0).norm());
            checks.push(Check::below(format!("n={n}, k={k}: |c -+ 1|, c = [{:.6}, {:.6}]", c.re, c.im), dist, 1e-4));
        }
    }
    Ok(checks)
}

fn period_identity() -> ItemResult {
    let mut checks = Vec::new();
    for n in 3..=5usize {
        let big_q = Cx::new(1.0, 0.0);
        let radius = 2.0 * (n - 1) as f64;
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            let angle = -0.9 + 1.8 * i as f64 / 9.0;
            let lambda = Cx::from_polar(radius * (1.2 + 0.1 * i as f64), angle);
            let b = BranchState::principal(lambda)?;
            worst = worst.max(twisted_projective_defect(n, big_q, n as i64, &b, 1e-15)?);
        }
        checks.push(Check::below(format!("n={n}: twisted vs projective periods, relative"), worst, 1e-8));
    }
    Ok(checks)
}

fn recursions() -> ItemResult {
    let mut hom: f64 = 0.0;
    let mut div: f64 = 0.0;
    let mut symp: f64 = 0.0;
    let q = Cx::new(1.3, 0.4);
    for n in 3..=6usize {
        hom = hom.max(twisted_homogeneity_defect(n, q, 10)?);
        div = div.max(twisted_divisor_defect(n, q, 10)?);
        let tw = SpaceModel::twisted_e(n)?;
        symp = symp.max(symplectic_defect(&s_from_inverse(&s_inverse_twisted(n, q, 12), &tw), &tw));
        let pr = SpaceModel::proj(n - 2);
        symp = symp.max(symplectic_defect(&s_from_inverse(&s_inverse_proj(n - 2, q, 12), &pr), &pr));
    }
    Ok(vec![
        Check::below("twisted S_l homogeneity, l <= 10, n <= 6", hom, 1e-12),
        Check::below("twisted divisor relation, l <= 10, n <= 6", div, 1e-10),
        Check::below("symplectic condition through z^-12", symp, 1e-10),
    ])
}

/// The monodromy acting on `beta` is the same at every level; the lowest
/// level with an invertible series solution has the smallest rounding.
fn composition() -> ItemResult {
    (3..=5usize)
        .map(|n| {
            let m = n as i64 - 2;
            let d = composition_defect(n, Cx::new(0.0, 0.0), m, ODE_TOL)?;
            Ok(Check::below(format!("n={n}, m={m}: |C_(n-2)..C_0 - big circle|"), d, 1e-5))
        })
        .collect()
}

fn mirror() -> ItemResult {
    let mut checks = Vec::new();
    for n in 3..=4usize {
        let m = n as i64;
        for q in [0.5, 1.0, 2.0] {
            let cfg = mb_config_for(n, q, m, critical_value(n, q), 1e-8)?;
            let worst = zero_region_scan(n, q, m, 20, &cfg)?.iter().map(|s| s.value.norm()).fold(0.0, f64::max);
            checks.push(Check::below(format!("n={n}, q={q}: max |G| on (0, u]"), worst, 1e-6));
        }
        let u = critical_value(n, 1.0);
        let worst = (0..10)
            .into_par_iter()
            .map(|i| -> Result<f64, GmError> {
                let lambda = u * (1.5 + 2.5 * i as f64 / 9.0);
                let l = Cx::new(lambda, 0.0);
                let s = phi_residue_series_auto(n, 1.0, m, l, 1e-16, 4000)?;
                let g = phi_mellin_barnes(n, 1.0, m, l, &mb_config_for(n, 1.0, m, lambda, 1e-9)?)?;
                Ok((s.value - g.value).norm())
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(Check::below(format!("n={n}: max |series - contour| on [1.5u, 4u]"), worst, 1e-6));
        let o = oscillatory_check(n, 1.0)?;
        checks.push(Check::below(
            format!("n={n}: oscillatory {:?} vs contour {:?}", cx(o.oscillatory), cx(o.contour)),
            o.difference,
            1e-4,
        ));
    }
    for n in 3..=4usize {
        let m = n as i64;
        let fit = local_exponent_fit(n, 1.0, m, 12)?;
        let expected = m as f64 - 0.5;
        checks.push(Check::below(
            format!("n={n}, m={m}: |exponent - {expected}|, exponent = {:.5}", fit.exponent),
            (fit.exponent - expected).abs(),
            0.02,
        ));
    }
    for s in laplace_spot_check(3, 1.0, 3, &[0.5, 1.0, 2.0], 1e-10)? {
        checks.push(Check::below(format!("n=3, s={}: Laplace relative difference", s.s), s.relative_difference, 1e-4));
    }
    Ok(checks)
}

fn gathmann() -> ItemResult {
    let reports = (3..=5usize).map(|n| crosscheck_against_bls(n, 8, 4)).collect::<Result<Vec<_>, _>>()?;
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    let checked: usize = reports.iter().map(|r| r.checked).sum();
    let nonzero: usize = reports.iter().map(|r| r.predicate_false_nonzero).sum();
    Ok(vec![
        Check::flag("violations over n <= 5, K <= 8, d <= 4", violations as f64, violations == 0),
        Check::flag("predicate-true entries checked (>= 20)", checked as f64, checked >= 20),
        Check::flag("predicate-false nonzero entries (>= 5)", nonzero as f64, nonzero >= 5),
    ])
}

fn run_item(name: &'static str) -> ItemReport {
    let result = match name {
        "pairing" => pairing(),
        "reflections" => reflections(),
        "twisted" => twisted(),
        "period-identity" => period_identity(),
        "recursions" => recursions(),
        "composition" => composition(),
        "mirror" => mirror(),
        "gathmann" => gathmann(),
        _ => unreachable!("unknown suite item {name}"),
    };
    match result {
        Ok(checks) => ItemReport { name, passed: checks.iter().all(|c| c.passed), checks, error: None },
        Err(e) => ItemReport { name, passed: false, checks: Vec::new(), error: Some(e.to_string()) },
    }
}

/// Resolve `--only` filters against [`ITEMS`]; unknown names are returned as errors.
pub fn select(only: &[String]) -> Result<Vec<&'static str>, String> {
    if only.is_empty() {
        return Ok(ITEMS.to_vec());
    }
    let wanted: Vec<&str> = only.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()).collect();
    if let Some(bad) = wanted.iter().find(|w| !ITEMS.contains(w)) {
        return Err(format!("unknown suite item `{bad}`; known items: {}", ITEMS.join(", ")));
    }
    Ok(ITEMS.iter().copied().filter(|i| wanted.contains(i)).collect())
}

/// Items run concurrently; the report keeps the order of [`ITEMS`].
pub fn run(items: &[&'static str]) -> (Envelope<SuiteReport>, bool) {
    let reports: Vec<ItemReport> = items.par_iter().map(|&n| run_item(n)).collect();
    let errored = reports.iter().any(|r| r.error.is_some());
    let passed = reports.iter().all(|r| r.passed);
    (Envelope::new("suite", passed, SuiteReport { items: reports }), errored)
}
