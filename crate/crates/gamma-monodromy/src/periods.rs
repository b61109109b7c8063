//! Calibrated periods, the fundamental solution of the second structure
//! connection, and the twisted periods of the exceptional divisor.

use std::f64::consts::PI;

use num_complex::Complex64 as Cx;

use crate::cohomology::{SpaceKind, SpaceModel};
use crate::error::{GmError, Result};
use crate::numerics::linalg::eigenvalues;
use crate::numerics::{expm, max_abs, recip_gamma_jet, BranchState, CMatrix, CVector, Jet};
use crate::quantum::{
    quantum_mult_proj, quantum_mult_twisted, s_from_inverse, s_inverse_proj, s_inverse_twisted, QuantumProduct,
    SSeries,
};

/// Maximum number of calibration terms summed before giving up.
pub const MAX_TERMS: usize = 200;
/// `|lambda|` must exceed this multiple of the largest discriminant modulus.
pub const CONVERGENCE_GUARD: f64 = 1.5;

/// The calibrated period
/// `I~^(L)(lambda) = sum_k (1/k!) [d_s^k lambda^{theta+s-1/2} / Gamma(theta+s+1/2)]_{s=-L} rho^k`
/// with `rho` acting from the right. `theta` must be diagonal.
pub fn master_period(space: &SpaceModel, level: i64, branch: &BranchState) -> Result<CMatrix> {
    let n = space.rank();
    let order = n.saturating_sub(1).min(12);
    let mut rho_pows = vec![crate::numerics::identity(n)];
    for k in 1..=order {
        rho_pows.push(&rho_pows[k - 1] * &space.rho);
    }
    let log_l = branch.log_value;
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        let th = space.theta[(i, i)];
        let a = th - level as f64 - 0.5;
        // lambda^{a+w} = lambda^a exp(w log lambda)
        let mut pw = Jet::constant(Cx::new(0.0, 0.0), order);
        pw.coeffs[0] = a * log_l;
        if order >= 1 {
            pw.coeffs[1] = log_l;
        }
        let jet = &pw.exp() * &recip_gamma_jet(a + 1.0, order)?;
        for (k, rk) in rho_pows.iter().enumerate() {
            let c = jet.coeffs[k];
            if c == Cx::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let r = rk[(i, j)];
                if r != Cx::new(0.0, 0.0) {
                    out[(i, j)] += c * r;
                }
            }
        }
    }
    Ok(out)
}

/// A matrix-valued period at one point, with the series bookkeeping.
#[derive(Debug, Clone)]
pub struct MatrixSolution {
    pub value: CMatrix,
    pub level: i64,
    pub branch: BranchState,
    pub terms: usize,
    /// Relative size of the neglected tail plus accumulated rounding.
    pub truncation_error: f64,
}

impl MatrixSolution {
    pub fn apply(&self, beta: &CVector) -> CVector {
        &self.value * beta
    }
}

/// A space together with its quantum product and calibration.
#[derive(Debug, Clone)]
pub struct PeriodSystem {
    pub space: SpaceModel,
    pub product: QuantumProduct,
    pub s: SSeries,
}

impl PeriodSystem {
    /// `P^{n-2}` at Novikov parameter `q`.
    pub fn proj(n: usize, q: Cx) -> Result<Self> {
        if n < 3 {
            return Err(GmError::InvalidArgument("projective periods need n >= 3".into()));
        }
        let product = quantum_mult_proj(n - 2, q)?;
        let space = product.space.clone();
        let sinv = s_inverse_proj(n - 2, q, MAX_TERMS);
        let s = s_from_inverse(&sinv, &space);
        Ok(PeriodSystem { space, product, s })
    }

    /// The twisted model of the exceptional divisor of `Bl P^n` at `Q`.
    pub fn twisted(n: usize, big_q: Cx) -> Result<Self> {
        if n < 3 {
            return Err(GmError::InvalidArgument("twisted periods need n >= 3".into()));
        }
        let product = quantum_mult_twisted(n, big_q)?;
        let space = product.space.clone();
        let sinv = s_inverse_twisted(n, big_q, MAX_TERMS);
        let s = s_from_inverse(&sinv, &space);
        Ok(PeriodSystem { space, product, s })
    }

    /// Largest modulus of a discriminant point.
    pub fn discriminant_radius(&self) -> f64 {
        eigenvalues(&self.product.euler).iter().map(|u| u.norm()).fold(0.0, f64::max)
    }

    pub fn discriminant(&self) -> Vec<Cx> {
        eigenvalues(&self.product.euler)
    }

    /// `I^(L) = sum_k (-1)^k S_k I~^(L+k)`.
    pub fn fundamental_solution(&self, level: i64, branch: &BranchState, tol: f64) -> Result<MatrixSolution> {
        fundamental_solution(&self.space, &self.product, &self.s, level, branch, tol)
    }

    pub fn rhs(&self, level: i64) -> impl Fn(Cx, &CMatrix) -> Result<CMatrix> + '_ {
        ssc_rhs(&self.space, &self.product, level)
    }
}

/// Sum the calibrated series for `I^(L)` at the point carried by `branch`.
pub fn fundamental_solution(
    space: &SpaceModel,
    product: &QuantumProduct,
    sseries: &SSeries,
    level: i64,
    branch: &BranchState,
    tol: f64,
) -> Result<MatrixSolution> {
    let lambda = branch.point;
    let radius = eigenvalues(&product.euler).iter().map(|u| u.norm()).fold(0.0, f64::max);
    if lambda.norm() <= CONVERGENCE_GUARD * radius {
        return Err(GmError::OutsideConvergence { lambda, radius: CONVERGENCE_GUARD * radius });
    }
    let n = space.rank();
    let mut sum = CMatrix::zeros(n, n);
    let mut small_run = 0;
    let mut recent = [0.0f64; 3];
    let mut abs_total = 0.0;
    let max_terms = MAX_TERMS.min(sseries.coeffs.len());
    for k in 0..max_terms {
        let sk = &sseries.coeffs[k];
        if k > 0 && max_abs(sk) == 0.0 {
            // Exactly vanishing coefficients say nothing about convergence.
            continue;
        }
        let term = {
            let t = sk * master_period(space, level + k as i64, branch)?;
            if k % 2 == 1 { -t } else { t }
        };
        let tn = max_abs(&term);
        if !tn.is_finite() {
            return Err(GmError::NonConvergence { terms: k, last: f64::INFINITY });
        }
        sum += &term;
        abs_total += tn;
        let sn = max_abs(&sum);
        recent[k % 3] = tn;
        if k > 0 && tn < tol * sn {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            let tail: f64 = recent.iter().sum();
            let rounding = 64.0 * f64::EPSILON * abs_total;
            return Ok(MatrixSolution {
                value: sum,
                level,
                branch: *branch,
                terms: k + 1,
                truncation_error: (tail + rounding) / sn,
            });
        }
    }
    let sn = max_abs(&sum).max(f64::MIN_POSITIVE);
    Err(GmError::NonConvergence { terms: max_terms, last: recent.iter().cloned().fold(0.0, f64::max) / sn })
}

/// The right-hand side `(lambda - E)^{-1} (theta - L - 1/2) Y` of the second
/// structure connection.
pub fn ssc_rhs<'a>(space: &'a SpaceModel, product: &'a QuantumProduct, level: i64) -> impl Fn(Cx, &CMatrix) -> Result<CMatrix> + 'a {
    let n = space.rank();
    let shifted = &space.theta - crate::numerics::identity(n) * Cx::new(level as f64 + 0.5, 0.0);
    move |lambda: Cx, y: &CMatrix| {
        let a = crate::numerics::identity(n) * lambda - &product.euler;
        let rhs = &shifted * y;
        a.lu().solve(&rhs).ok_or(GmError::SingularMatrix { cond: f64::INFINITY })
    }
}

/// `twI^(-m)_beta = sum_l twS_l (-d/dlambda)^l twI~^(-m)_beta`.
pub fn twisted_period(n: usize, big_q: Cx, m: i64, beta: &CVector, branch: &BranchState, tol: f64) -> Result<CVector> {
    let sys = PeriodSystem::twisted(n, big_q)?;
    Ok(sys.fundamental_solution(-m, branch, tol)?.apply(beta))
}

/// `sigma = exp(pi i theta)` on `H(P^m)`.
pub fn sigma_transform(space: &SpaceModel, beta: &CVector) -> Result<CVector> {
    if !matches!(space.kind, SpaceKind::Proj(_)) {
        return Err(GmError::UnsupportedSpace(space.kind.to_string()));
    }
    Ok(expm(&(&space.theta * Cx::new(0.0, PI))) * beta)
}

/// Relative defect of the matrix identity
/// `twI(Q, lambda) = exp(-pi i theta) I(-Q^{-(n-1)}, lambda) sigma` at level
/// `-m`, with `e^i` identified with `p^{i-1}`.
pub fn twisted_projective_defect(n: usize, big_q: Cx, m: i64, branch: &BranchState, tol: f64) -> Result<f64> {
    let tw = PeriodSystem::twisted(n, big_q)?;
    let q = -big_q.powi(-(n as i32 - 1));
    let pr = PeriodSystem::proj(n, q)?;
    let lhs = tw.fundamental_solution(-m, branch, tol)?.value;
    let rhs_base = pr.fundamental_solution(-m, branch, tol)?.value;
    let phase = expm(&(&pr.space.theta * Cx::new(0.0, PI)));
    let inv_phase = expm(&(&pr.space.theta * Cx::new(0.0, -PI)));
    let rhs = inv_phase * rhs_base * phase;
    Ok(max_abs(&(&lhs - &rhs)) / max_abs(&rhs))
}
