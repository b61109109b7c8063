//! `reflections`: reflection vectors of the loops around the discriminant.

use gamma_monodromy::monodromy::{proj_reflection, twisted_reflection_check_log};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{integration_tol, PolarParam, SpaceSpec};
use crate::report::{cvec, cx, Check, CliError, Envelope};

#[derive(Debug, Clone)]
pub struct ReflectionArgs {
    pub space: SpaceSpec,
    pub param: PolarParam,
    pub k: Option<usize>,
    pub m: Option<i64>,
    pub tol: f64,
}

#[derive(Debug, Serialize)]
pub struct ProjEntry {
    pub k: usize,
    pub alpha: Vec<[f64; 2]>,
    pub candidate: Vec<[f64; 2]>,
    pub sign: i8,
    pub self_pairing: [f64; 2],
    pub determinant: [f64; 2],
    pub ode_steps: usize,
    pub checks: Vec<Check>,
}

#[derive(Debug, Serialize)]
pub struct TwistedEntry {
    pub k: usize,
    pub beta: Vec<[f64; 2]>,
    pub candidate: Vec<[f64; 2]>,
    pub constant: [f64; 2],
    pub sign: i8,
    pub determinant: [f64; 2],
    pub ode_steps: usize,
    pub checks: Vec<Check>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Entries {
    Proj(Vec<ProjEntry>),
    Twisted(Vec<TwistedEntry>),
}

#[derive(Debug, Serialize)]
pub struct ReflectionReport {
    pub space: String,
    pub n: usize,
    pub parameter: PolarParam,
    pub m: i64,
    pub tol: f64,
    pub integration_tol: f64,
    pub entries: Entries,
}

fn loop_indices(n: usize, k: Option<usize>) -> Result<Vec<usize>, CliError> {
    match k {
        Some(k) if k > n - 2 => Err(CliError::Usage(format!("--k {k} exceeds n - 2 = {}", n - 2))),
        Some(k) => Ok(vec![k]),
        None => Ok((0..=n - 2).collect()),
    }
}

pub fn run(args: &ReflectionArgs) -> Result<Envelope<ReflectionReport>, CliError> {
    let n = args.space.family_n();
    let m = args.m.unwrap_or(n as i64);
    if !(0..=40).contains(&m) {
        return Err(CliError::Usage(format!("--m {m} is outside 0 ..= 40")));
    }
    let ks = loop_indices(n, args.k)?;
    let itol = integration_tol(args.tol);
    let tol = args.tol;
    let log = args.param.log();
    let (entries, passed) = match args.space {
        SpaceSpec::Proj(_) => {
            let rows = ks
                .par_iter()
                .map(|&k| {
                    let r = proj_reflection(n, log, k, m, itol)?;
                    let checks = vec![
                        Check::below("componentwise residual |alpha - sign*Psi(O(k))|", r.residual, tol),
                        Check::below("|(alpha|alpha) - 2|", (r.reflection.self_pairing - 2.0).norm(), tol),
                        Check::below("|det C + 1|", r.monodromy.residuals.determinant, tol),
                        Check::below("|C^2 - 1| / max(1, |C|^2)", r.monodromy.residuals.involution_relative, tol),
                    ];
                    Ok(ProjEntry {
                        k,
                        alpha: cvec(&r.reflection.alpha),
                        candidate: cvec(&r.candidate),
                        sign: r.reflection.sign,
                        self_pairing: cx(r.reflection.self_pairing),
                        determinant: cx(r.monodromy.determinant()),
                        ode_steps: r.monodromy.residuals.accepted_steps,
                        checks,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let ok = rows.iter().all(|r| r.checks.iter().all(|c| c.passed));
            (Entries::Proj(rows), ok)
        }
        SpaceSpec::Twisted(_) => {
            let rows = ks
                .par_iter()
                .map(|&k| {
                    let r = twisted_reflection_check_log(n, log, k, m, itol)?;
                    let c = r.constant;
                    let sign: i8 = if c.re >= 0.0 { 1 } else { -1 };
                    let checks = vec![
                        Check::below("|constant - sign|", (c - sign as f64).norm(), tol),
                        Check::below("relative fit residual", r.fit_residual, tol),
                        Check::below("|det C + 1|", r.monodromy.residuals.determinant, tol),
                    ];
                    Ok(TwistedEntry {
                        k,
                        beta: cvec(&r.beta),
                        candidate: cvec(&r.candidate),
                        constant: cx(c),
                        sign,
                        determinant: cx(r.monodromy.determinant()),
                        ode_steps: r.monodromy.residuals.accepted_steps,
                        checks,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let ok = rows.iter().all(|r| r.checks.iter().all(|c| c.passed));
            (Entries::Twisted(rows), ok)
        }
        SpaceSpec::BlProj(_) => {
            return Err(CliError::Usage("reflections needs proj:m or twisted:n; blproj has no loop family".into()));
        }
    };
    let report = ReflectionReport {
        space: args.space.to_string(),
        n,
        parameter: args.param,
        m,
        tol,
        integration_tol: itol,
        entries,
    };
    Ok(Envelope::new("reflections", passed, report))
}
