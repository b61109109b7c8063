//! `phi`: residue series against the contour integral, the vanishing scan
//! below the critical value and the local exponent at it.

use std::path::Path;

use gamma_monodromy::mirror::{
    critical_value, local_exponent_fit, mb_config_for, phi_mellin_barnes, phi_residue_series_auto, zero_region_scan,
};
use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{PolarParam, SpaceSpec};
use crate::report::{cx, sink, Check, CliError, Envelope};

/// Allowed distance of the fitted exponent from `m - 1/2`.
pub const EXPONENT_TOL: f64 = 0.02;

#[derive(Debug, Clone)]
pub struct PhiArgs {
    pub space: SpaceSpec,
    pub param: PolarParam,
    pub m: Option<i64>,
    pub tol: f64,
    pub points: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub zero_points: usize,
    pub fit_samples: usize,
}

#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub lambda: f64,
    pub series: [f64; 2],
    pub contour: [f64; 2],
    pub abs_diff: f64,
    pub tail_bound: f64,
    pub series_degrees: usize,
}

#[derive(Debug, Serialize)]
pub struct ZeroRow {
    pub lambda: f64,
    pub contour: [f64; 2],
    pub tail_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub exponent: f64,
    pub expected: f64,
    pub r_squared: f64,
    pub samples: usize,
}

#[derive(Debug, Serialize)]
pub struct PhiReport {
    pub n: usize,
    pub q: f64,
    pub m: i64,
    pub critical_value: f64,
    pub tol: f64,
    pub compare: Vec<CompareRow>,
    pub zero_region: Vec<ZeroRow>,
    pub exponent_fit: Option<FitReport>,
    pub checks: Vec<Check>,
}

pub fn run(args: &PhiArgs) -> Result<Envelope<PhiReport>, CliError> {
    let SpaceSpec::Proj(_) = args.space else {
        return Err(CliError::Usage("phi needs a space of the form proj:m".into()));
    };
    if args.param.arg_pi != 0.0 {
        return Err(CliError::Usage("phi needs a real positive q (argument 0)".into()));
    }
    if !(1.0 < args.lambda_min && args.lambda_min <= args.lambda_max) {
        return Err(CliError::Usage("need 1 < --lambda-min <= --lambda-max".into()));
    }
    if args.points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let n = args.space.family_n();
    let q = args.param.modulus;
    let m = args.m.unwrap_or(n as i64);
    if !(1..=40).contains(&m) {
        return Err(CliError::Usage(format!("--m {m} is outside 1 ..= 40")));
    }
    let tol = args.tol;
    let contour_tol = (tol * 1e-3).max(1e-13);
    let u = critical_value(n, q);

    let lambdas: Vec<f64> = (0..args.points)
        .map(|i| {
            let t = if args.points == 1 { 0.0 } else { i as f64 / (args.points - 1) as f64 };
            u * (args.lambda_min + (args.lambda_max - args.lambda_min) * t)
        })
        .collect();
    let compare = lambdas
        .par_iter()
        .map(|&lambda| -> Result<CompareRow, CliError> {
            let s = phi_residue_series_auto(n, q, m, Cx::new(lambda, 0.0), 1e-16, 4000)?;
            let cfg = mb_config_for(n, q, m, lambda, contour_tol)?;
            let c = phi_mellin_barnes(n, q, m, Cx::new(lambda, 0.0), &cfg)?;
            Ok(CompareRow {
                lambda,
                series: cx(s.value),
                contour: cx(c.value),
                abs_diff: (s.value - c.value).norm(),
                tail_bound: c.tail_bound,
                series_degrees: s.degrees,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let zero_region = if args.zero_points > 0 {
        let cfg = mb_config_for(n, q, m, u, contour_tol)?;
        zero_region_scan(n, q, m, args.zero_points, &cfg)?
            .into_iter()
            .map(|z| ZeroRow { lambda: z.lambda, contour: cx(z.value), tail_bound: z.tail_bound })
            .collect()
    } else {
        Vec::new()
    };

    let exponent_fit = if args.fit_samples > 0 {
        let f = local_exponent_fit(n, q, m, args.fit_samples)?;
        Some(FitReport { exponent: f.exponent, expected: m as f64 - 0.5, r_squared: f.r_squared, samples: f.samples.len() })
    } else {
        None
    };

    let mut checks = vec![Check::below(
        "max |series - contour|",
        compare.iter().map(|r| r.abs_diff).fold(0.0, f64::max),
        tol,
    )];
    if !zero_region.is_empty() {
        let worst = zero_region.iter().map(|z| z.contour[0].hypot(z.contour[1])).fold(0.0, f64::max);
        checks.push(Check::below("max |contour| on (0, u]", worst, tol));
    }
    if let Some(f) = &exponent_fit {
        checks.push(Check::below("|exponent - (m - 1/2)|", (f.exponent - f.expected).abs(), EXPONENT_TOL));
    }
    let passed = checks.iter().all(|c| c.passed);
    let report = PhiReport { n, q, m, critical_value: u, tol, compare, zero_region, exponent_fit, checks };
    Ok(Envelope::new("phi", passed, report))
}

/// CSV with one row per sample; the `section` column tells the kinds apart.
pub fn write_csv(path: Option<&Path>, doc: &Envelope<PhiReport>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    let csv_err = |e: csv::Error| CliError::Numeric(format!("csv output failed: {e}"));
    w.write_record([
        "section", "lambda", "series_re", "series_im", "contour_re", "contour_im", "abs_diff", "tail_bound", "exponent",
        "r_squared",
    ])
    .map_err(csv_err)?;
    let f = |x: f64| format!("{x:.17e}");
    let r = &doc.report;
    for row in &r.compare {
        w.write_record([
            "compare".to_string(),
            f(row.lambda),
            f(row.series[0]),
            f(row.series[1]),
            f(row.contour[0]),
            f(row.contour[1]),
            f(row.abs_diff),
            f(row.tail_bound),
            String::new(),
            String::new(),
        ])
        .map_err(csv_err)?;
    }
    for row in &r.zero_region {
        w.write_record([
            "zero_region".to_string(),
            f(row.lambda),
            String::new(),
            String::new(),
            f(row.contour[0]),
            f(row.contour[1]),
            f(row.contour[0].hypot(row.contour[1])),
            f(row.tail_bound),
            String::new(),
            String::new(),
        ])
        .map_err(csv_err)?;
    }
    if let Some(fit) = &r.exponent_fit {
        let mut rec = vec!["exponent_fit".to_string()];
        rec.extend(std::iter::repeat(String::new()).take(7));
        rec.push(f(fit.exponent));
        rec.push(f(fit.r_squared));
        w.write_record(rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
