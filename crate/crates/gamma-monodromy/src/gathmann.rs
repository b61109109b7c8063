//! A vanishing criterion for genus-zero descendant invariants of `Bl P^n`
//! and a scan that tests it against the calibration of the blowup.
//!
//! A correlator `<phi_a psi^k, phi_b.., e^{l_1}, .., e^{l_s}>` of curve class
//! `beta L + d ell` (with `L` a pulled-back line and `ell` a line in the
//! exceptional divisor) vanishes when
//!
//! 1. `beta != 0`,
//! 2. `wt(phi_a) + sum (l_i - 1) > 0` or `d > 0`,
//! 3. `wt(phi_a) + sum (l_i - 1) < (d + 1)(n - 1) - k`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::{SpaceKind, SpaceModel};
use crate::error::{GmError, Result};
use crate::quantum::blowup_calibration;

/// Largest blowup dimension, descendant order and degree accepted by the scan.
pub const MAX_SCAN_N: usize = 5;
pub const MAX_SCAN_ORDER: usize = 8;
pub const MAX_SCAN_DEGREE: usize = 4;

/// Absolute threshold below which a calibration entry counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Weight of basis vector `index` of `Bl P^n`: zero on `1, h, .., h^n` and
/// `k - 1` on `e^k`.
pub fn weight(space: &SpaceModel, index: usize) -> Result<usize> {
    let SpaceKind::BlProj(n) = space.kind else {
        return Err(GmError::UnsupportedSpace(space.kind.to_string()));
    };
    if index >= space.rank() {
        return Err(GmError::InvalidArgument(format!("basis index {index} out of range for {}", space.kind)));
    }
    Ok(if index <= n { 0 } else { index - n - 1 })
}

/// Shape data of a one-descendant correlator on `Bl P^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelatorDescriptor {
    pub n: usize,
    /// Weight of the class carrying the descendant.
    pub wt_a: usize,
    /// Power of `psi`.
    pub k: usize,
    /// Powers `l_i` of the exceptional insertions, each in `2..=n-1`.
    #[serde(default)]
    pub exceptional_powers: Vec<usize>,
    /// Exceptional degree; negative values occur once `beta != 0`.
    pub d: i64,
    pub beta_nonzero: bool,
}

impl CorrelatorDescriptor {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(GmError::InvalidArgument(format!("n = {} must be at least 2", self.n)));
        }
        if self.wt_a > self.n - 2 {
            return Err(GmError::InvalidArgument(format!("wt_a = {} exceeds n - 2 = {}", self.wt_a, self.n - 2)));
        }
        if let Some(l) = self.exceptional_powers.iter().find(|&&l| l < 2 || l > self.n - 1) {
            return Err(GmError::InvalidArgument(format!("exceptional power {l} outside 2..={}", self.n - 1)));
        }
        Ok(())
    }

    /// `wt_a + sum (l_i - 1)`.
    pub fn total_weight(&self) -> i64 {
        self.wt_a as i64 + self.exceptional_powers.iter().map(|&l| l as i64 - 1).sum::<i64>()
    }
}

/// True exactly when all three vanishing conditions hold.
pub fn must_vanish(c: &CorrelatorDescriptor) -> bool {
    let w = c.total_weight();
    let bound = (c.d + 1) * (c.n as i64 - 1) - c.k as i64;
    c.beta_nonzero && (w > 0 || c.d > 0) && w < bound
}

/// One calibration entry `(phi_a, [q1^d1 q2^d2 z^-j] S^{-1} phi_col)`, which is
/// up to sign the invariant `<phi_a psi^{j-1}, phi_col>` of class
/// `d2 L + (d1 - d2) ell`.
#[derive(Debug, Clone, Serialize)]
pub struct ScannedEntry {
    pub a: usize,
    pub col: usize,
    pub d1: usize,
    pub d2: usize,
    pub j: usize,
    pub value: f64,
    pub descriptor: CorrelatorDescriptor,
    pub predicted_zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub n: usize,
    pub order: usize,
    pub dmax: usize,
    /// Dimension-admissible entries with a true predicate.
    pub checked: usize,
    pub violations: Vec<ScannedEntry>,
    pub predicate_false_nonzero: usize,
    pub predicate_false_zero: usize,
    /// Largest `|value|` among entries predicted to vanish.
    pub max_predicted_zero: f64,
    pub positive_power_residual: f64,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every dimension-admissible calibration entry of `Bl P^n` with
/// `1 <= j <= order` and `d1, d2 <= dmax`, paired with its descriptor.
///
/// For the unit column the descriptor is that of the one-point invariant
/// `<phi_a psi^{j-2}>`; `j = 1` there is skipped since the two-point
/// invariant `<phi_a, 1>` of a nonzero class vanishes by the string equation.
/// The column `e` is skipped because the divisor equation turns it into a
/// correlator without exceptional insertion rather than one with `l = 1`.
pub fn scan_entries(n: usize, order: usize, dmax: usize) -> Result<(Vec<ScannedEntry>, f64)> {
    let cal = blowup_calibration(n, dmax, order)?;
    let space = &cal.space;
    let size = space.rank();
    let dim = n as i64;
    let mut jobs = Vec::new();
    for col in (0..size).filter(|&c| c != n + 1) {
        for d1 in 0..=dmax {
            for d2 in 0..=dmax {
                for j in 1..=order {
                    jobs.push((col, d1, d2, j));
                }
            }
        }
    }
    let entries = jobs
        .par_iter()
        .map(|&(col, d1, d2, j)| -> Result<Vec<ScannedEntry>> {
            let coef = cal.coefficient(col, d1, d2, j);
            let d = d1 as i64 - d2 as i64;
            let c1_degree = (n as i64 + 1) * d2 as i64 + (n as i64 - 1) * d;
            let exceptional_powers = if col > n + 1 { vec![col - n] } else { Vec::new() };
            // The string equation turns <phi_a psi^{j-1}, 1> into the one-point
            // invariant <phi_a psi^{j-2}>, whose descriptor is the sharper one.
            let k = if col == 0 { j as i64 - 2 } else { j as i64 - 1 };
            let mut out = Vec::new();
            if k < 0 {
                return Ok(out);
            }
            for a in 0..size {
                let lhs = (space.degrees[a] + space.degrees[col]) as i64 + j as i64 - 1;
                if lhs != dim - 1 + c1_degree {
                    continue;
                }
                let value: f64 = (0..size).map(|b| space.pairing[(a, b)] * coef[b]).sum();
                let descriptor = CorrelatorDescriptor {
                    n,
                    wt_a: weight(space, a)?,
                    k: k as usize,
                    exceptional_powers: exceptional_powers.clone(),
                    d,
                    beta_nonzero: d2 > 0,
                };
                let predicted_zero = must_vanish(&descriptor);
                out.push(ScannedEntry { a, col, d1, d2, j, value, descriptor, predicted_zero });
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((entries.into_iter().flatten().collect(), cal.positive_power_residual))
}

/// Scan the calibration and count how the predicate fares.
pub fn crosscheck_against_bls(n: usize, order: usize, dmax: usize) -> Result<CrosscheckReport> {
    if !(3..=MAX_SCAN_N).contains(&n) || order > MAX_SCAN_ORDER || dmax > MAX_SCAN_DEGREE {
        return Err(GmError::InvalidArgument(format!(
            "scan needs 3 <= n <= {MAX_SCAN_N}, order <= {MAX_SCAN_ORDER}, dmax <= {MAX_SCAN_DEGREE}"
        )));
    }
    let (entries, positive_power_residual) = scan_entries(n, order, dmax)?;
    let mut report = CrosscheckReport {
        n,
        order,
        dmax,
        checked: 0,
        violations: Vec::new(),
        predicate_false_nonzero: 0,
        predicate_false_zero: 0,
        max_predicted_zero: 0.0,
        positive_power_residual,
    };
    for e in entries {
        let zero = e.value.abs() <= ZERO_TOL;
        if e.predicted_zero {
            report.checked += 1;
            report.max_predicted_zero = report.max_predicted_zero.max(e.value.abs());
            if !zero {
                report.violations.push(e);
            }
        } else if zero {
            report.predicate_false_zero += 1;
        } else {
            report.predicate_false_nonzero += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(n: usize, wt_a: usize, k: usize, ls: &[usize], d: i64, beta: bool) -> CorrelatorDescriptor {
        CorrelatorDescriptor { n, wt_a, k, exceptional_powers: ls.to_vec(), d, beta_nonzero: beta }
    }

    #[test]
    fn weights_of_blowup_basis() {
        let s = SpaceModel::bl_proj(4).unwrap();
        assert_eq!(weight(&s, 0).unwrap(), 0);
        assert_eq!(weight(&s, 3).unwrap(), 0);
        assert_eq!(weight(&s, 5).unwrap(), 0);
        assert_eq!(weight(&s, 7).unwrap(), 2);
        assert!(weight(&s, 8).is_err());
        assert!(weight(&SpaceModel::proj(2), 0).is_err());
    }

    #[test]
    fn predicate_examples() {
        assert!(must_vanish(&desc(3, 0, 0, &[2], 0, true)));
        assert!(must_vanish(&desc(3, 0, 0, &[], 1, true)));
        assert!(!must_vanish(&desc(3, 0, 0, &[2], 0, false)));
        // condition (ii) fails
        assert!(!must_vanish(&desc(3, 0, 0, &[], 0, true)));
        // condition (iii) fails: 1 < 2 - 1 is false
        assert!(!must_vanish(&desc(3, 0, 1, &[2], 0, true)));
    }

    #[test]
    fn descriptor_validation() {
        assert!(desc(4, 2, 0, &[2, 3], 0, true).validate().is_ok());
        assert!(desc(4, 3, 0, &[], 0, true).validate().is_err());
        assert!(desc(4, 0, 0, &[1], 0, true).validate().is_err());
        assert!(desc(4, 0, 0, &[4], 0, true).validate().is_err());
    }

    #[test]
    fn scan_for_p3_blowup_has_no_violations() {
        let r = crosscheck_against_bls(3, 6, 3).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
        assert!(r.checked > 0);
        assert!(r.predicate_false_nonzero > 0);
    }
}
