//! Small quantum products at the origin of the small phase space.

use std::f64::consts::PI;

use num_complex::Complex64 as Cx;

use crate::cohomology::{SpaceKind, SpaceModel};
use crate::error::{GmError, Result};
use crate::numerics::{identity, CMatrix};

/// Quantum multiplication operators for one value of the Novikov parameter.
#[derive(Debug, Clone)]
pub struct QuantumProduct {
    pub space: SpaceModel,
    /// `q` for projective space, `Q` for the twisted model.
    pub param: Cx,
    /// Multiplication by the ring generator (`p` or `e`).
    pub generator: CMatrix,
    /// The operator `E bullet` appearing in `lambda - E bullet`.
    pub euler: CMatrix,
}

impl QuantumProduct {
    /// Multiplication by the basis element with index `a`, when the basis
    /// consists of powers of the generator.
    pub fn mult_by_basis(&self, a: usize) -> CMatrix {
        let mut m = identity(self.space.rank());
        let power = match self.space.kind {
            SpaceKind::TwistedE(_) => a + 1,
            _ => a,
        };
        for _ in 0..power {
            m = &self.generator * m;
        }
        m
    }
}

/// `p bullet` on `H(P^m)`: the companion matrix of `p^{m+1} = q`.
pub fn quantum_mult_proj(m: usize, q: Cx) -> Result<QuantumProduct> {
    if m < 1 {
        return Err(GmError::InvalidArgument("quantum product needs m >= 1".into()));
    }
    let space = SpaceModel::proj(m);
    let n = m + 1;
    let mut p = CMatrix::zeros(n, n);
    for i in 0..m {
        p[(i + 1, i)] = Cx::new(1.0, 0.0);
    }
    p[(0, m)] = q;
    let euler = &p * Cx::new(n as f64, 0.0);
    Ok(QuantumProduct { space, param: q, generator: p, euler })
}

/// `e bullet_tw` on the reduced cohomology of the exceptional divisor:
/// `e^i -> e^{i+1}` and `e^{n-1} -> (-1)^n Q^{-(n-1)} e`.
pub fn quantum_mult_twisted(n: usize, big_q: Cx) -> Result<QuantumProduct> {
    if big_q.norm() == 0.0 {
        return Err(GmError::InvalidArgument("Q must be non-zero".into()));
    }
    let space = SpaceModel::twisted_e(n)?;
    let r = n - 1;
    let mut e = CMatrix::zeros(r, r);
    for i in 0..r.saturating_sub(1) {
        e[(i + 1, i)] = Cx::new(1.0, 0.0);
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    e[(0, r - 1)] += big_q.powi(-(r as i32)) * sign;
    let euler = &e * Cx::new(-(r as f64), 0.0);
    Ok(QuantumProduct { space, param: big_q, generator: e, euler })
}

/// The discriminant points `u_k = (n-1) eta^{-2k} q^{1/(n-1)}`, `eta = exp(pi i/(n-1))`,
/// of `P^{n-2}`, with `q^{1/(n-1)}` taken from the supplied `log q`.
pub fn discriminant_proj(n: usize, q_log: Cx) -> Vec<Cx> {
    let r = (n - 1) as f64;
    let root = (q_log / r).exp();
    (0..n - 1).map(|k| Cx::from_polar(r, -2.0 * PI * k as f64 / r) * root).collect()
}

/// The discriminant `(n-1) eta^{2k+1} / Q` of the twisted model.
pub fn discriminant_twisted(n: usize, big_q: Cx) -> Vec<Cx> {
    let r = (n - 1) as f64;
    (0..n - 1).map(|k| Cx::from_polar(r, PI * (2 * k + 1) as f64 / r) / big_q).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::{eigenvalues, max_abs};

    #[test]
    fn p1_relation() {
        let qp = quantum_mult_proj(1, Cx::new(1.0, 0.0)).unwrap();
        let pp = &qp.generator * &qp.generator;
        assert!(max_abs(&(pp - identity(2))) < 1e-15);
    }

    #[test]
    fn twisted_n3_matrix() {
        let big_q = Cx::new(1.7, 0.0);
        let qp = quantum_mult_twisted(3, big_q).unwrap();
        // e . e^2 = -Q^{-2} e
        assert!((qp.generator[(0, 1)] + big_q.powi(-2)).norm() < 1e-15);
    }

    #[test]
    fn twisted_discriminant_matches_eigenvalues() {
        for n in 3..=6 {
            let big_q = Cx::new(0.8, 0.0);
            let qp = quantum_mult_twisted(n, big_q).unwrap();
            let ev = eigenvalues(&qp.euler);
            for u in discriminant_twisted(n, big_q) {
                let d = ev.iter().map(|l| (l - u).norm()).fold(f64::INFINITY, f64::min);
                assert!(d < 1e-10, "n={n}: {u}");
            }
        }
    }

    #[test]
    fn frobenius_property_of_proj_product() {
        let qp = quantum_mult_proj(3, Cx::new(0.4, -1.1)).unwrap();
        let g = qp.space.pairing_c();
        for a in 0..4 {
            let m = qp.mult_by_basis(a);
            assert!(max_abs(&(m.transpose() * &g - &g * &m)) < 1e-14);
        }
    }
}
