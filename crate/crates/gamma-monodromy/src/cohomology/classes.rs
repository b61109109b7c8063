//! K-theory classes, characteristic classes, and the Gamma-integral structure.

use std::f64::consts::PI;

use num_complex::Complex64 as Cx;
use serde::{Deserialize, Serialize};

use super::space::{SpaceKind, SpaceModel};
use crate::error::{GmError, Result};
use crate::numerics::special::log_gamma_one_plus_coeffs;
use crate::numerics::{expm, CVector, Jet};

/// The line bundle `O(a H + b E)`; on projective space only `a` is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBundle {
    pub h: i64,
    pub e: i64,
}

/// A formal integer combination of line bundles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KClass {
    pub terms: Vec<(i64, LineBundle)>,
}

impl KClass {
    pub fn line(h: i64, e: i64) -> Self {
        KClass { terms: vec![(1, LineBundle { h, e })] }
    }

    /// `O(k)`.
    pub fn o(k: i64) -> Self {
        Self::line(k, 0)
    }

    /// The class `O_E(j) := O(jE) - O((j-1)E)`, i.e. the restriction of
    /// `O(jE)` to the exceptional divisor.
    pub fn o_exceptional(j: i64) -> Self {
        KClass { terms: vec![(1, LineBundle { h: 0, e: j }), (-1, LineBundle { h: 0, e: j - 1 })] }
    }

    pub fn dual(&self) -> Self {
        KClass { terms: self.terms.iter().map(|(c, l)| (*c, LineBundle { h: -l.h, e: -l.e })).collect() }
    }
}

fn hyperplane_and_exceptional(space: &SpaceModel) -> Result<(CVector, Option<CVector>)> {
    match space.kind {
        SpaceKind::Proj(m) => {
            let mut h = CVector::zeros(space.rank());
            if m >= 1 {
                h[1] = Cx::new(1.0, 0.0);
            }
            Ok((h, None))
        }
        SpaceKind::BlProj(n) => Ok((space.basis_vector(1), Some(space.basis_vector(n + 1)))),
        SpaceKind::TwistedE(_) => Err(GmError::UnsupportedSpace(space.kind.to_string())),
    }
}

/// Chern character of a K-class.
pub fn chern_character(k: &KClass, space: &SpaceModel) -> Result<CVector> {
    let (h, e) = hyperplane_and_exceptional(space)?;
    let mut out = CVector::zeros(space.rank());
    for (mult, lb) in &k.terms {
        if lb.e != 0 && e.is_none() {
            return Err(GmError::UnsupportedSpace(format!("exceptional twist on {}", space.kind)));
        }
        let mut c1 = &h * Cx::new(lb.h as f64, 0.0);
        if let Some(e) = &e {
            c1 += e * Cx::new(lb.e as f64, 0.0);
        }
        out += space.exp_class(&c1)? * Cx::new(*mult as f64, 0.0);
    }
    Ok(out)
}

/// `prod_r f(x_r)` over the Chern roots, for a series with `f(0) = 1`, computed
/// as `exp(sum_r log f(x_r))`.
fn multiplicative_class(space: &SpaceModel, log_f: &[Cx]) -> Result<CVector> {
    if space.chern_roots.is_empty() {
        return Err(GmError::UnsupportedSpace(space.kind.to_string()));
    }
    let mut acc = CVector::zeros(space.rank());
    for (mult, root) in &space.chern_roots {
        let x = CVector::from_iterator(space.rank(), root.iter().map(|r| Cx::new(*r, 0.0)));
        acc += space.power_series_at(log_f, &x)? * Cx::new(*mult as f64, 0.0);
    }
    let m = space.cup_matrix(&acc);
    Ok(expm(&m) * space.unit_vector()?)
}

/// The Gamma class `prod_r Gamma(1 + x_r)`.
pub fn gamma_class(space: &SpaceModel) -> Result<CVector> {
    let c = log_gamma_one_plus_coeffs();
    let order = (space.dim + 1).min(12);
    let coeffs: Vec<Cx> = (0..=order).map(|k| Cx::new(c[k], 0.0)).collect();
    multiplicative_class(space, &coeffs)
}

/// The Todd class `prod_r x_r / (1 - exp(-x_r))`.
pub fn todd_class(space: &SpaceModel) -> Result<CVector> {
    let order = space.dim + 1;
    // (1 - exp(-x)) / x = sum_k (-1)^k x^k / (k+1)!
    let mut f = 1.0;
    let mut c = Vec::with_capacity(order + 1);
    for k in 0..=order {
        f *= (k + 1) as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c.push(Cx::new(sign / f, 0.0));
    }
    let log_todd = (-&Jet::from_coeffs(c).ln()).coeffs;
    multiplicative_class(space, &log_todd)
}

/// `chi(E, F) = int ch(E^dual) ch(F) td`.
pub fn hrr_chi(e: &KClass, f: &KClass, space: &SpaceModel) -> Result<Cx> {
    let a = chern_character(&e.dual(), space)?;
    let b = chern_character(f, space)?;
    let td = todd_class(space)?;
    let prod = space.cup_product(&space.cup_product(&a, &b), &td);
    space.integrate(&prod)
}

/// The Gamma-integral structure
/// `Psi_q(E) = (2 pi)^{(1-dim)/2} Gamma cup exp(-sum_i p_i log q_i) cup (2 pi i)^deg ch(E)`.
///
/// `q_logs` holds one logarithm per divisor of the space, in the order of
/// `SpaceModel::divisors`.
pub fn psi_map(k: &KClass, space: &SpaceModel, q_logs: &[Cx]) -> Result<CVector> {
    if q_logs.len() != space.divisors.len() {
        return Err(GmError::InvalidArgument(format!(
            "{} needs {} Novikov logarithms, got {}",
            space.kind,
            space.divisors.len(),
            q_logs.len()
        )));
    }
    let ch = chern_character(k, space)?;
    let scaled = space.degree_scale(&ch, Cx::new(0.0, 2.0 * PI));
    let mut shift = CVector::zeros(space.rank());
    for (d, lq) in space.divisors.iter().zip(q_logs) {
        shift[*d] -= *lq;
    }
    let qpart = space.exp_class(&shift)?;
    let gamma = gamma_class(space)?;
    let v = space.cup_product(&space.cup_product(&gamma, &qpart), &scaled);
    Ok(v * Cx::new((2.0 * PI).powf((1.0 - space.dim as f64) / 2.0), 0.0))
}

/// The bilinear Euler pairing
/// `<a, b> = (1 / 2 pi) (a, exp(pi i theta) exp(pi i rho) b)`.
pub fn euler_pairing(space: &SpaceModel, a: &CVector, b: &CVector) -> Cx {
    let i_pi = Cx::new(0.0, PI);
    let et = expm(&(&space.theta * i_pi));
    let er = expm(&(&space.rho * i_pi));
    space.poincare(a, &(et * er * b)) / (2.0 * PI)
}

/// The symmetric intersection pairing `(a|b) = <a, b> + <b, a>`.
pub fn intersection_pairing(space: &SpaceModel, a: &CVector, b: &CVector) -> Cx {
    euler_pairing(space, a, b) + euler_pairing(space, b, a)
}

/// Drop the `h^n` component of a blowup class lying in the exceptional part,
/// giving its coordinates in the basis `e, ..., e^{n-1}`.
pub fn exceptional_part(space: &SpaceModel, v: &CVector) -> Result<CVector> {
    match space.kind {
        SpaceKind::BlProj(n) => Ok(CVector::from_iterator(n - 1, (1..n).map(|k| v[n + k]))),
        _ => Err(GmError::UnsupportedSpace(space.kind.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chern_character_of_line_on_p2() {
        let s = SpaceModel::proj(2);
        let ch = chern_character(&KClass::o(3), &s).unwrap();
        assert!((ch[0] - 1.0).norm() < 1e-15);
        assert!((ch[1] - 3.0).norm() < 1e-15);
        assert!((ch[2] - 4.5).norm() < 1e-15);
    }

    #[test]
    fn gamma_class_of_p1() {
        // Gamma(1+p)^2 = 1 - 2 gamma p on P^1
        let g = gamma_class(&SpaceModel::proj(1)).unwrap();
        assert!((g[1].re + 2.0 * crate::numerics::special::EULER_GAMMA).abs() < 1e-15);
    }

    #[test]
    fn euler_characteristic_of_structure_sheaf_is_one() {
        for s in [SpaceModel::proj(3), SpaceModel::bl_proj(3).unwrap()] {
            let chi = hrr_chi(&KClass::o(0), &KClass::o(0), &s).unwrap();
            assert!((chi - 1.0).norm() < 1e-13, "{}: {chi}", s.kind);
        }
    }
}
