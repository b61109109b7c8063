//! Paths in the punctured plane and adaptive integration of matrix ODEs along them.

use std::f64::consts::PI;

use num_complex::Complex64 as Cx;
use serde::Serialize;

use super::linalg::{max_abs, CMatrix};
use crate::error::{GmError, Result};

/// A point of the plane together with a chosen value of its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchState {
    pub point: Cx,
    pub log_value: Cx,
}

impl BranchState {
    /// Checks that `exp(log_value)` reproduces `point`.
    pub fn new(point: Cx, log_value: Cx) -> Result<Self> {
        if point.norm() == 0.0 {
            return Err(GmError::InvalidArgument("branch point at the origin".into()));
        }
        if (log_value.exp() - point).norm() > 1e-9 * point.norm() {
            return Err(GmError::InvalidArgument(format!("log value {log_value} does not match point {point}")));
        }
        Ok(BranchState { point, log_value })
    }

    /// Principal branch at `point`.
    pub fn principal(point: Cx) -> Result<Self> {
        Self::new(point, point.ln())
    }
}

/// `b^s` evaluated on the branch carried by `b`.
pub fn branch_power(b: &BranchState, s: Cx) -> Cx {
    (s * b.log_value).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PathPiece {
    Segment { from: Cx, to: Cx },
    /// Counterclockwise when `angle1 > angle0`, clockwise otherwise.
    Arc { center: Cx, radius: f64, angle0: f64, angle1: f64 },
}

impl PathPiece {
    pub fn point(&self, s: f64) -> Cx {
        match *self {
            PathPiece::Segment { from, to } => from + (to - from) * s,
            PathPiece::Arc { center, radius, angle0, angle1 } => {
                center + Cx::from_polar(radius, angle0 + (angle1 - angle0) * s)
            }
        }
    }

    pub fn velocity(&self, s: f64) -> Cx {
        match *self {
            PathPiece::Segment { from, to } => to - from,
            PathPiece::Arc { radius, angle0, angle1, .. } => {
                let th = angle0 + (angle1 - angle0) * s;
                Cx::new(0.0, angle1 - angle0) * Cx::from_polar(radius, th)
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            PathPiece::Segment { from, to } => (to - from).norm(),
            PathPiece::Arc { radius, angle0, angle1, .. } => radius * (angle1 - angle0).abs(),
        }
    }

    pub fn start(&self) -> Cx {
        self.point(0.0)
    }

    pub fn end(&self) -> Cx {
        self.point(1.0)
    }
}

/// A piecewise path; consecutive pieces must join.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSpec {
    pub pieces: Vec<PathPiece>,
}

impl PathSpec {
    pub fn new(pieces: Vec<PathPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(GmError::InvalidArgument("empty path".into()));
        }
        for w in pieces.windows(2) {
            let (a, b) = (w[0].end(), w[1].start());
            if (a - b).norm() > 1e-9 * (1.0 + a.norm()) {
                return Err(GmError::InvalidArgument(format!("path pieces do not join: {a} vs {b}")));
            }
        }
        Ok(PathSpec { pieces })
    }

    pub fn start(&self) -> Cx {
        self.pieces[0].start()
    }

    pub fn end(&self) -> Cx {
        self.pieces[self.pieces.len() - 1].end()
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length()).sum()
    }

    /// Minimum distance from sampled points of the path to `z`.
    pub fn distance_to(&self, z: Cx) -> f64 {
        let mut best = f64::INFINITY;
        for p in &self.pieces {
            let samples = 400;
            for i in 0..=samples {
                best = best.min((p.point(i as f64 / samples as f64) - z).norm());
            }
        }
        best
    }
}

/// The full circle of the given radius around `center`, starting on the
/// positive real direction.
pub fn circle(center: Cx, radius: f64, counterclockwise: bool) -> PathSpec {
    let a1 = if counterclockwise { 2.0 * PI } else { -2.0 * PI };
    PathSpec { pieces: vec![PathPiece::Arc { center, radius, angle0: 0.0, angle1: a1 }] }
}

#[derive(Debug, Clone)]
pub struct OdeOptions {
    /// Local error allowance per unit arclength, relative to `max(1, |Y|)`.
    pub tol: f64,
    /// Points the step-size cap keeps away from.
    pub singularities: Vec<Cx>,
    /// Record `(lambda, Y)` after each accepted step.
    pub record_trace: bool,
}

impl OdeOptions {
    pub fn new(tol: f64, singularities: Vec<Cx>) -> Self {
        OdeOptions { tol, singularities, record_trace: false }
    }
}

#[derive(Debug, Clone)]
pub struct OdeOutcome {
    pub y: CMatrix,
    pub branch: BranchState,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub trace: Vec<(Cx, CMatrix)>,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Continues `dY/dlambda = rhs(lambda, Y)` along `path` with a Dormand-Prince
/// 5(4) pair. The logarithm of `lambda` is carried along as an extra scalar
/// so the returned branch is the analytic continuation of `branch0`.
pub fn ode_continue<F>(rhs: F, path: &PathSpec, y0: &CMatrix, branch0: BranchState, opts: &OdeOptions) -> Result<OdeOutcome>
where
    F: Fn(Cx, &CMatrix) -> Result<CMatrix>,
{
    if (branch0.point - path.start()).norm() > 1e-9 * (1.0 + branch0.point.norm()) {
        return Err(GmError::InvalidArgument("branch point differs from the path start".into()));
    }
    let mut y = y0.clone();
    let mut logv = branch0.log_value;
    let mut accepted = 0;
    let mut rejected = 0;
    let mut trace = Vec::new();
    if opts.record_trace {
        trace.push((path.start(), y.clone()));
    }
    for piece in &path.pieces {
        let len = piece.length();
        if len == 0.0 {
            continue;
        }
        let mut s = 0.0;
        let mut h_arc = (0.01 * len).min(0.05);
        while s < 1.0 {
            let lam = piece.point(s);
            let dist = opts.singularities.iter().map(|u| (lam - u).norm()).fold(f64::INFINITY, f64::min);
            let hmax = (0.1 * dist).min(0.2 * len);
            h_arc = h_arc.min(hmax);
            let mut ds = h_arc / len;
            if ds * len < 1e-13 * (1.0 + len) {
                return Err(GmError::StepUnderflow { at: lam });
            }
            // Absorb a remainder much shorter than the step instead of leaving
            // a sliver for a final, artificially tiny step.
            if s + 1.01 * ds >= 1.0 {
                ds = 1.0 - s;
            }
            let mut ky: Vec<CMatrix> = Vec::with_capacity(7);
            let mut kl: Vec<Cx> = Vec::with_capacity(7);
            for stage in 0..7 {
                let mut ys = y.clone();
                for (j, kyj) in ky.iter().enumerate() {
                    let a = A[stage][j];
                    if a != 0.0 {
                        ys += kyj * Cx::new(a * ds, 0.0);
                    }
                }
                let st = s + C[stage] * ds;
                let l = piece.point(st);
                let v = piece.velocity(st);
                ky.push(rhs(l, &ys)? * v);
                kl.push(v / l);
            }
            let mut y5 = y.clone();
            let mut l5 = logv;
            // The embedded difference is accumulated directly; subtracting two
            // full updates would bury it in rounding.
            let mut diff = CMatrix::zeros(y.nrows(), y.ncols());
            for stage in 0..7 {
                if B5[stage] != 0.0 {
                    y5 += &ky[stage] * Cx::new(B5[stage] * ds, 0.0);
                    l5 += kl[stage] * (B5[stage] * ds);
                }
                let e = B5[stage] - B4[stage];
                if e != 0.0 {
                    diff += &ky[stage] * Cx::new(e * ds, 0.0);
                }
            }
            let scale = max_abs(&y5).max(1.0);
            let err = max_abs(&diff) / scale;
            let h_used = ds * len;
            let allowed = opts.tol * h_used;
            if !err.is_finite() {
                return Err(GmError::NonFinite(format!("ODE state near {lam}")));
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * (allowed / err).powf(0.25)).clamp(0.2, 5.0) };
            if err <= allowed {
                y = y5;
                logv = l5;
                s += ds;
                accepted += 1;
                if opts.record_trace {
                    trace.push((piece.point(s.min(1.0)), y.clone()));
                }
                h_arc = h_used * factor;
            } else {
                rejected += 1;
                h_arc = h_used * factor;
            }
        }
    }
    let end = path.end();
    // Snap the carried logarithm to the exact endpoint, keeping its sheet.
    let principal = end.ln();
    let turns = ((logv.im - principal.im) / (2.0 * PI)).round();
    let log_end = Cx::new(principal.re, principal.im + 2.0 * PI * turns);
    Ok(OdeOutcome {
        y,
        branch: BranchState { point: end, log_value: log_end },
        accepted_steps: accepted,
        rejected_steps: rejected,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::identity;

    #[test]
    fn scalar_power_function_picks_up_monodromy() {
        // dy/dlambda = a y / lambda has solution lambda^a; going once around
        // the origin multiplies it by exp(2 pi i a).
        let a = Cx::new(0.3, 0.0);
        let path = circle(Cx::new(0.0, 0.0), 2.0, true);
        let y0 = identity(1) * Cx::new(2f64.powf(0.3), 0.0);
        let b0 = BranchState::principal(Cx::new(2.0, 0.0)).unwrap();
        let out = ode_continue(|l, y| Ok(y * (a / l)), &path, &y0, b0, &OdeOptions::new(1e-11, vec![Cx::new(0.0, 0.0)])).unwrap();
        let expected = y0[(0, 0)] * (Cx::new(0.0, 2.0 * PI) * a).exp();
        assert!((out.y[(0, 0)] - expected).norm() < 1e-9);
        assert!((out.branch.log_value - Cx::new(2f64.ln(), 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn contractible_loop_returns_to_start() {
        let a = Cx::new(0.7, 0.2);
        let path = circle(Cx::new(3.0, 0.0), 1.0, false);
        let start = path.start();
        let y0 = identity(1) * (a * start.ln()).exp();
        let b0 = BranchState::principal(start).unwrap();
        let out = ode_continue(|l, y| Ok(y * (a / l)), &path, &y0, b0, &OdeOptions::new(1e-11, vec![Cx::new(0.0, 0.0)])).unwrap();
        assert!((out.y[(0, 0)] - y0[(0, 0)]).norm() < 1e-9);
        assert!((out.branch.log_value - b0.log_value).norm() < 1e-12);
    }

    #[test]
    fn joined_pieces_are_validated() {
        let bad = PathSpec::new(vec![
            PathPiece::Segment { from: Cx::new(0.0, 0.0), to: Cx::new(1.0, 0.0) },
            PathPiece::Segment { from: Cx::new(2.0, 0.0), to: Cx::new(3.0, 0.0) },
        ]);
        assert!(bad.is_err());
    }

    #[test]
    fn branch_power_uses_carried_log() {
        let b = BranchState::new(Cx::new(-1.0, 0.0), Cx::new(0.0, -PI)).unwrap();
        let r = branch_power(&b, Cx::new(0.5, 0.0));
        assert!((r - Cx::new(0.0, -1.0)).norm() < 1e-15);
    }
}
