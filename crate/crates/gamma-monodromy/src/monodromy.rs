//! Simple loops around the discriminant, monodromy matrices of the second
//! structure connection, and reflection vectors.

use std::f64::consts::PI;

use num_complex::Complex64 as Cx;
use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{exceptional_part, intersection_pairing, psi_map, KClass, SpaceKind, SpaceModel};
use crate::error::{GmError, Result};
use crate::numerics::linalg::{condition_estimate, max_abs_vec};
use crate::numerics::{
    eig_unit_minus, expm, identity, inverse, max_abs, ode_continue, BranchState, CMatrix, CVector, OdeOptions,
    PathPiece, PathSpec,
};
use crate::periods::PeriodSystem;

/// Base radius of the loops at `q = 1`, as a multiple of `n - 1`.
pub const BASE_RADIUS_FACTOR: f64 = 2.0;
/// Default ratio between the small circle radius and the available room.
pub const DEFAULT_SHRINK: f64 = 0.8;
/// Eigenvalues closer than this to `-1` are candidates for the reflection.
pub const EIGEN_TOL: f64 = 1e-4;
/// Largest condition number accepted for the fundamental solution at the base.
pub const MAX_BASE_CONDITION: f64 = 1e8;

/// Base point `lambda0 q^{1/(n-1)}` with `lambda0 = 2(n-1)` and its logarithm,
/// the root taken from `q_log`.
pub fn loop_base(n: usize, q_log: Cx) -> Result<BranchState> {
    let r = (n - 1) as f64;
    let lam0 = BASE_RADIUS_FACTOR * r;
    let log_value = Cx::new(lam0.ln(), 0.0) + q_log / r;
    BranchState::new(log_value.exp(), log_value)
}

/// The simple loop `gamma_k(q)`: a clockwise arc by `2 pi k/(n-1)` on the base
/// circle, a segment towards `u_k`, a counterclockwise circle around `u_k`, and
/// the same way back. Everything is rescaled by `q^{1/(n-1)}` from `q_log`.
///
/// The circle radius is `shrink * min(lambda0 - (n-1), min_{j != l} |u_j - u_l|)`
/// times `|q|^{1/(n-1)}`.
pub fn gamma_loop(n: usize, q_log: Cx, k: usize, shrink: f64) -> Result<PathSpec> {
    if n < 3 || k > n - 2 {
        return Err(GmError::InvalidArgument(format!("loop index {k} out of range for n = {n}")));
    }
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(GmError::InvalidArgument(format!("shrink factor {shrink} must lie in (0, 1)")));
    }
    let r = (n - 1) as f64;
    let lam0 = BASE_RADIUS_FACTOR * r;
    let scale = (q_log / r).exp();
    let rot = -2.0 * PI * k as f64 / r;
    let pairwise = if n == 3 { f64::INFINITY } else { 2.0 * r * (PI / r).sin() };
    let room = (lam0 - r).min(pairwise);
    let radius = shrink * room * scale.norm();

    let arg0 = scale.arg();
    let big = lam0 * scale.norm();
    let target = Cx::from_polar(r, rot) * scale;
    let outer = Cx::from_polar(big, arg0 + rot);
    let dir = (outer - target) / (outer - target).norm();
    let near = target + dir * radius;
    let phi = dir.arg();
    let mut pieces = Vec::new();
    if k > 0 {
        pieces.push(PathPiece::Arc { center: Cx::new(0.0, 0.0), radius: big, angle0: arg0, angle1: arg0 + rot });
    }
    pieces.push(PathPiece::Segment { from: outer, to: near });
    pieces.push(PathPiece::Arc { center: target, radius, angle0: phi, angle1: phi + 2.0 * PI });
    pieces.push(PathPiece::Segment { from: near, to: outer });
    if k > 0 {
        pieces.push(PathPiece::Arc { center: Cx::new(0.0, 0.0), radius: big, angle0: arg0 + rot, angle1: arg0 });
    }
    PathSpec::new(pieces)
}

/// The counterclockwise circle through the base point, enclosing every
/// discriminant point.
pub fn big_circle_loop(base: Cx) -> Result<PathSpec> {
    let a = base.arg();
    PathSpec::new(vec![PathPiece::Arc { center: Cx::new(0.0, 0.0), radius: base.norm(), angle0: a, angle1: a + 2.0 * PI }])
}

#[derive(Debug, Clone, Serialize)]
pub struct MonodromyResiduals {
    /// `|C^2 - 1|`, zero for a reflection.
    pub involution: f64,
    /// `|C^2 - 1| / max(1, |C|^2)`, the size rounding can actually resolve.
    pub involution_relative: f64,
    /// `|det C + 1|`.
    pub determinant: f64,
    /// Condition estimate of the fundamental solution at the base point.
    pub base_condition: f64,
    /// Relative truncation error of the series at the base point.
    pub series: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// The constant matrix `C` with `I_continued = I_base C`.
#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub path: PathSpec,
    pub matrix: CMatrix,
    pub base: BranchState,
    pub end_branch: BranchState,
    pub residuals: MonodromyResiduals,
}

impl MonodromyResult {
    pub fn determinant(&self) -> Cx {
        self.matrix.determinant()
    }
}

/// Continue the fundamental solution of level `level` along `path`, starting
/// from its series value at `base`.
pub fn monodromy_matrix(sys: &PeriodSystem, level: i64, path: &PathSpec, base: &BranchState, tol: f64) -> Result<MonodromyResult> {
    let series_tol = (tol * 1e-3).max(1e-15);
    let start = sys.fundamental_solution(level, base, series_tol)?;
    let cond = condition_estimate(&start.value);
    if cond > MAX_BASE_CONDITION {
        return Err(GmError::SingularMatrix { cond });
    }
    // Columns of the fundamental solution differ by powers of lambda; unit
    // columns keep the error control meaningful for all of them. Since the
    // system is linear, the scaling commutes with the continuation.
    let n = start.value.ncols();
    let mut scaled = start.value.clone();
    let mut norms = vec![1.0; n];
    for j in 0..n {
        norms[j] = scaled.column(j).norm();
        if norms[j] > 0.0 {
            scaled.column_mut(j).unscale_mut(norms[j]);
        }
    }
    let opts = OdeOptions::new(tol, sys.discriminant());
    let out = ode_continue(sys.rhs(level), path, &scaled, *base, &opts)?;
    let mut matrix = inverse(&scaled)? * &out.y;
    for i in 0..n {
        for j in 0..n {
            matrix[(i, j)] *= norms[j] / norms[i];
        }
    }
    let involution = max_abs(&(&matrix * &matrix - identity(n)));
    let involution_relative = involution / max_abs(&matrix).powi(2).max(1.0);
    let determinant = (matrix.determinant() + 1.0).norm();
    Ok(MonodromyResult {
        path: path.clone(),
        matrix,
        base: *base,
        end_branch: out.branch,
        residuals: MonodromyResiduals {
            involution,
            involution_relative,
            determinant,
            base_condition: cond,
            series: start.truncation_error,
            accepted_steps: out.accepted_steps,
            rejected_steps: out.rejected_steps,
        },
    })
}

/// A reflection vector normalized to `(alpha|alpha) = 2`.
#[derive(Debug, Clone)]
pub struct Reflection {
    pub alpha: CVector,
    /// `+1` or `-1` relative to the candidate, or to the convention that the
    /// first non-negligible coefficient has positive real part.
    pub sign: i8,
    pub self_pairing: Cx,
    /// `|C alpha + alpha|`.
    pub eigen_residual: f64,
}

/// Extract the `-1` eigenvector of the monodromy and scale it so that
/// `(alpha|alpha) = 2`. With a candidate, the sign maximizing the real part
/// of the Hermitian overlap is chosen and reported.
pub fn reflection_vector(result: &MonodromyResult, space: &SpaceModel, candidate: Option<&CVector>) -> Result<Reflection> {
    let v = eig_unit_minus(&result.matrix, EIGEN_TOL)?;
    let p = intersection_pairing(space, &v, &v);
    if p.norm() < 1e-14 {
        return Err(GmError::SingularMatrix { cond: f64::INFINITY });
    }
    let mut alpha = &v * (Cx::new(2.0, 0.0) / p).sqrt();
    let sign = match candidate {
        Some(c) => {
            let overlap: Cx = c.iter().zip(alpha.iter()).map(|(a, b)| a.conj() * b).sum();
            if overlap.re >= 0.0 {
                1
            } else {
                -1
            }
        }
        None => {
            let big = max_abs_vec(&alpha);
            let first = alpha.iter().find(|z| z.norm() > 1e-8 * big).copied().unwrap_or_default();
            if first.re >= 0.0 {
                1
            } else {
                -1
            }
        }
    };
    if sign < 0 {
        alpha = -alpha;
    }
    let self_pairing = intersection_pairing(space, &alpha, &alpha);
    let eigen_residual = max_abs_vec(&(&result.matrix * &alpha + &alpha));
    Ok(Reflection { alpha, sign, self_pairing, eigen_residual })
}

/// `w_alpha(x) = x - (alpha|x) alpha`.
pub fn reflection_action(space: &SpaceModel, alpha: &CVector, x: &CVector) -> Result<CVector> {
    if alpha.len() != space.rank() || x.len() != space.rank() {
        return Err(GmError::InvalidArgument("vector length does not match the space".into()));
    }
    Ok(x - alpha * intersection_pairing(space, alpha, x))
}

/// Matrix of `w_alpha` in the basis of the space.
pub fn reflection_matrix(space: &SpaceModel, alpha: &CVector) -> Result<CMatrix> {
    let n = space.rank();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m.set_column(j, &reflection_action(space, alpha, &space.basis_vector(j))?);
    }
    Ok(m)
}

/// Monodromy of the big counterclockwise circle read off from the exponents
/// at infinity: `exp(2 pi i (theta - L - 1/2)) exp(2 pi i rho)`, valid when
/// the spectrum of `theta` is constant modulo the integers.
pub fn big_circle_from_exponents(space: &SpaceModel, level: i64) -> Result<CMatrix> {
    let n = space.rank();
    let phase = |i: usize| (Cx::new(0.0, 2.0 * PI) * (space.theta[(i, i)] - level as f64 - 0.5)).exp();
    let p0 = phase(0);
    for i in 1..n {
        if (phase(i) - p0).norm() > 1e-12 {
            return Err(GmError::UnsupportedSpace(format!("{} has non-integral spectrum differences", space.kind)));
        }
    }
    Ok(expm(&(&space.rho * Cx::new(0.0, 2.0 * PI))) * p0)
}

/// Monodromy of the big circle computed by continuation.
pub fn big_circle_by_continuation(sys: &PeriodSystem, level: i64, base: &BranchState, tol: f64) -> Result<MonodromyResult> {
    let path = big_circle_loop(base.point)?;
    monodromy_matrix(sys, level, &path, base, tol)
}

/// Monodromies of `gamma_0, .., gamma_{n-2}` on `P^{n-2}`, each with its residuals.
pub fn simple_loop_monodromies(n: usize, q_log: Cx, m: i64, tol: f64) -> Result<Vec<MonodromyResult>> {
    let sys = PeriodSystem::proj(n, q_log.exp())?;
    let base = loop_base(n, q_log)?;
    (0..=n - 2)
        .into_par_iter()
        .map(|k| monodromy_matrix(&sys, -m, &gamma_loop(n, q_log, k, DEFAULT_SHRINK)?, &base, tol))
        .collect()
}

/// `C_{n-2} ... C_1 C_0`, the monodromy of running `gamma_0` first and
/// `gamma_{n-2}` last, which is homotopic to the big counterclockwise circle
/// through the base point.
pub fn simple_loop_product(monodromies: &[MonodromyResult]) -> CMatrix {
    let n = monodromies.first().map_or(0, |r| r.matrix.nrows());
    monodromies.iter().rev().fold(identity(n), |acc, r| acc * &r.matrix)
}

/// Largest entry of the difference between the simple-loop product and the
/// big-circle monodromy read from the exponents at infinity.
pub fn composition_defect(n: usize, q_log: Cx, m: i64, tol: f64) -> Result<f64> {
    let loops = simple_loop_monodromies(n, q_log, m, tol)?;
    let product = simple_loop_product(&loops);
    let space = SpaceModel::proj(n - 2);
    let big = big_circle_from_exponents(&space, -m)?;
    Ok(max_abs(&(product - big)))
}

/// One reflection of projective space compared with `Psi_q(O(k))`.
#[derive(Debug, Clone)]
pub struct ProjReflectionReport {
    pub n: usize,
    pub k: usize,
    pub monodromy: MonodromyResult,
    pub reflection: Reflection,
    pub candidate: CVector,
    /// Largest componentwise difference between `alpha` and `sign * candidate`.
    pub residual: f64,
}

/// Reflection of `gamma_k(q)` on `P^{n-2}` at level `-m`, compared with the
/// Gamma-integral image of `O(k)`.
pub fn proj_reflection(n: usize, q_log: Cx, k: usize, m: i64, tol: f64) -> Result<ProjReflectionReport> {
    let sys = PeriodSystem::proj(n, q_log.exp())?;
    let path = gamma_loop(n, q_log, k, DEFAULT_SHRINK)?;
    let base = loop_base(n, q_log)?;
    let mono = monodromy_matrix(&sys, -m, &path, &base, tol)?;
    let candidate = psi_map(&KClass::o(k as i64), &sys.space, &[q_log])?;
    let reflection = reflection_vector(&mono, &sys.space, Some(&candidate))?;
    let residual = max_abs_vec(&(&reflection.alpha - &candidate));
    Ok(ProjReflectionReport { n, k, monodromy: mono, reflection, candidate, residual })
}

/// Outcome of the reflection check on the twisted periods.
#[derive(Debug, Clone)]
pub struct TwistedReflectionReport {
    pub n: usize,
    pub big_q: Cx,
    pub k: usize,
    pub beta: CVector,
    /// Exceptional components of `Psi(O_E(-k+1))`.
    pub candidate: CVector,
    /// Least-squares constant `c` with `beta ~ c * candidate`.
    pub constant: Cx,
    /// `|beta - c candidate| / |beta|`.
    pub fit_residual: f64,
    pub monodromy: MonodromyResult,
}

/// Continue the twisted periods of `Bl P^n` along `gamma_k(q)` with
/// `q = -Q^{-(n-1)}` and `q^{1/(n-1)} = eta / Q`, extract the anti-invariant
/// vector, and compare it with the exceptional part of `Psi(O_E(-k+1))`.
pub fn twisted_reflection_check(n: usize, big_q: f64, k: usize, m: i64, tol: f64) -> Result<TwistedReflectionReport> {
    if !(big_q > 0.0) {
        return Err(GmError::InvalidArgument("Q must be a positive real number".into()));
    }
    twisted_reflection_check_log(n, Cx::new(big_q.ln(), 0.0), k, m, tol)
}

/// As [`twisted_reflection_check`], for `Q = exp(big_q_log)` on the branch
/// fixed by `big_q_log`.
pub fn twisted_reflection_check_log(n: usize, big_q_log: Cx, k: usize, m: i64, tol: f64) -> Result<TwistedReflectionReport> {
    if n < 3 || k > n - 2 {
        return Err(GmError::InvalidArgument(format!("need n >= 3 and k <= n - 2, got n = {n}, k = {k}")));
    }
    let r = (n - 1) as f64;
    let q_log = -big_q_log * r + Cx::new(0.0, PI);
    let big_q = big_q_log.exp();
    let sys = PeriodSystem::twisted(n, big_q)?;
    let path = gamma_loop(n, q_log, k, DEFAULT_SHRINK)?;
    let base = loop_base(n, q_log)?;
    let mono = monodromy_matrix(&sys, -m, &path, &base, tol)?;
    let refl = reflection_vector(&mono, &sys.space, None)?;
    let bl = SpaceModel::bl_proj(n)?;
    let full = psi_map(&KClass::o_exceptional(1 - k as i64), &bl, &[Cx::new(0.0, 0.0), big_q_log * r])?;
    let candidate = exceptional_part(&bl, &full)?;
    let cc: Cx = candidate.iter().map(|z| z.norm_sqr()).sum::<f64>().into();
    let constant: Cx = candidate.iter().zip(refl.alpha.iter()).map(|(a, b)| a.conj() * b).sum::<Cx>() / cc;
    let fit_residual = max_abs_vec(&(&refl.alpha - &candidate * constant)) / max_abs_vec(&refl.alpha);
    Ok(TwistedReflectionReport { n, big_q, k, beta: refl.alpha, candidate, constant, fit_residual, monodromy: mono })
}

/// Whether a space is one of the models carrying loops `gamma_k`.
pub fn has_loops(kind: SpaceKind) -> bool {
    matches!(kind, SpaceKind::Proj(_) | SpaceKind::TwistedE(_))
}
