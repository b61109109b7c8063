//! Cohomology rings with their grading, pairing and the operators built from them.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as Cx;
use serde::{Deserialize, Serialize};

use crate::error::{GmError, Result};
use crate::numerics::{CMatrix, CVector};

/// The spaces the crate knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceKind {
    /// Projective space of the given dimension, basis `1, p, ..., p^m`.
    Proj(usize),
    /// Blowup of `P^n` at a point, basis `1, h, ..., h^n, e, ..., e^{n-1}`.
    BlProj(usize),
    /// The reduced cohomology of the exceptional divisor of `Bl P^n`, basis
    /// `e, ..., e^{n-1}`, with the twisted grading and pairing.
    TwistedE(usize),
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Proj(m) => write!(f, "P^{m}"),
            SpaceKind::BlProj(n) => write!(f, "Bl P^{n}"),
            SpaceKind::TwistedE(n) => write!(f, "twisted E in Bl P^{n}"),
        }
    }
}

/// A finite-dimensional graded cohomology model.
///
/// `cup[i][j]` is the coefficient vector of `phi_i cup phi_j`. The matrices
/// `theta` and `rho` are the grading operator and classical multiplication by
/// the first Chern class (for the twisted model, by `-(n-1) e`).
#[derive(Debug, Clone)]
pub struct SpaceModel {
    pub kind: SpaceKind,
    pub dim: usize,
    pub labels: Vec<String>,
    pub degrees: Vec<usize>,
    pub cup: Vec<Vec<Vec<f64>>>,
    pub pairing: DMatrix<f64>,
    pub theta: CMatrix,
    pub rho: CMatrix,
    /// Basis index of the unit, if the model has one.
    pub unit: Option<usize>,
    /// Divisor classes used for Novikov variables, as basis indices.
    pub divisors: Vec<usize>,
    /// Chern roots of the tangent bundle as `(multiplicity, class)`.
    pub chern_roots: Vec<(i64, Vec<f64>)>,
}

fn zeros(n: usize) -> Vec<f64> {
    vec![0.0; n]
}

impl SpaceModel {
    pub fn proj(m: usize) -> Self {
        let n = m + 1;
        let mut cup = vec![vec![zeros(n); n]; n];
        for i in 0..n {
            for j in 0..n {
                if i + j <= m {
                    cup[i][j][i + j] = 1.0;
                }
            }
        }
        let pairing = DMatrix::from_fn(n, n, |i, j| if i + j == m { 1.0 } else { 0.0 });
        let mut p = zeros(n);
        if m >= 1 {
            p[1] = 1.0;
        }
        let degrees: Vec<usize> = (0..n).collect();
        let mut model = SpaceModel {
            kind: SpaceKind::Proj(m),
            dim: m,
            labels: (0..n).map(|i| format!("p^{i}")).collect(),
            degrees,
            cup,
            pairing,
            theta: CMatrix::zeros(n, n),
            rho: CMatrix::zeros(n, n),
            unit: Some(0),
            divisors: if m >= 1 { vec![1] } else { vec![] },
            chern_roots: vec![(n as i64, p)],
        };
        model.theta = model.grading_operator();
        let c1: Vec<f64> = model.chern_roots[0].1.iter().map(|x| x * n as f64).collect();
        model.rho = model.cup_matrix_real(&c1);
        model
    }

    /// Basis `1, h, ..., h^n, e, ..., e^{n-1}`; `e^n = (-1)^{n-1} h^n`.
    pub fn bl_proj(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GmError::InvalidArgument("blowup needs n >= 2".into()));
        }
        let size = 2 * n;
        let h_idx = |i: usize| i; // h^i, 0 <= i <= n
        let e_idx = |k: usize| n + k; // e^k, 1 <= k <= n-1
        let sign_n = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
        // (kind, power): kind 0 = h, 1 = e; the unit is h^0.
        let elem = |b: usize| -> (u8, usize) { if b <= n { (0, b) } else { (1, b - n) } };
        let mut cup = vec![vec![zeros(size); size]; size];
        for a in 0..size {
            for b in 0..size {
                let (ka, pa) = elem(a);
                let (kb, pb) = elem(b);
                let out = &mut cup[a][b];
                if pa == 0 {
                    out[b] = 1.0;
                } else if pb == 0 {
                    out[a] = 1.0;
                } else if ka == 0 && kb == 0 {
                    if pa + pb <= n {
                        out[h_idx(pa + pb)] = 1.0;
                    }
                } else if ka == 1 && kb == 1 {
                    let s = pa + pb;
                    if s < n {
                        out[e_idx(s)] = 1.0;
                    } else if s == n {
                        out[h_idx(n)] = sign_n;
                    }
                }
            }
        }
        let mut pairing = DMatrix::zeros(size, size);
        for a in 0..size {
            for b in 0..size {
                // Integral of phi_a cup phi_b is its h^n coefficient.
                pairing[(a, b)] = cup[a][b][h_idx(n)];
            }
        }
        let mut labels: Vec<String> = (0..=n).map(|i| format!("h^{i}")).collect();
        labels.extend((1..n).map(|k| format!("e^{k}")));
        let mut degrees: Vec<usize> = (0..=n).collect();
        degrees.extend(1..n);
        let mut hcls = zeros(size);
        hcls[h_idx(1)] = 1.0;
        let mut ecls = zeros(size);
        ecls[e_idx(1)] = 1.0;
        let neg_e: Vec<f64> = ecls.iter().map(|x| -x).collect();
        let mut model = SpaceModel {
            kind: SpaceKind::BlProj(n),
            dim: n,
            labels,
            degrees,
            cup,
            pairing,
            theta: CMatrix::zeros(size, size),
            rho: CMatrix::zeros(size, size),
            unit: Some(0),
            divisors: vec![h_idx(1), e_idx(1)],
            chern_roots: vec![((n + 1) as i64, hcls.clone()), (n as i64, neg_e), (1, ecls.clone())],
        };
        model.theta = model.grading_operator();
        let c1: Vec<f64> = (0..size).map(|i| (n + 1) as f64 * hcls[i] - (n - 1) as f64 * ecls[i]).collect();
        model.rho = model.cup_matrix_real(&c1);
        Ok(model)
    }

    /// Reduced cohomology of the exceptional divisor with the twisted structure.
    pub fn twisted_e(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GmError::InvalidArgument("twisted model needs n >= 2".into()));
        }
        let size = n - 1;
        let mut cup = vec![vec![zeros(size); size]; size];
        for a in 0..size {
            for b in 0..size {
                let s = a + b + 2;
                if s < n {
                    cup[a][b][s - 1] = 1.0;
                }
            }
        }
        let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let pairing = DMatrix::from_fn(size, size, |a, b| if a + b + 2 == n { sign } else { 0.0 });
        let mut theta = CMatrix::zeros(size, size);
        let mut rho = CMatrix::zeros(size, size);
        for a in 0..size {
            theta[(a, a)] = Cx::new(n as f64 / 2.0 - (a + 1) as f64, 0.0);
            if a + 1 < size {
                rho[(a + 1, a)] = Cx::new(-((n - 1) as f64), 0.0);
            }
        }
        Ok(SpaceModel {
            kind: SpaceKind::TwistedE(n),
            dim: n,
            labels: (1..n).map(|k| format!("e^{k}")).collect(),
            degrees: (1..n).collect(),
            cup,
            pairing,
            theta,
            rho,
            unit: None,
            divisors: vec![0],
            chern_roots: vec![],
        })
    }

    pub fn from_kind(kind: SpaceKind) -> Result<Self> {
        match kind {
            SpaceKind::Proj(m) => Ok(Self::proj(m)),
            SpaceKind::BlProj(n) => Self::bl_proj(n),
            SpaceKind::TwistedE(n) => Self::twisted_e(n),
        }
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    fn grading_operator(&self) -> CMatrix {
        let n = self.rank();
        let mut t = CMatrix::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = Cx::new(self.dim as f64 / 2.0 - self.degrees[i] as f64, 0.0);
        }
        t
    }

    pub fn basis_vector(&self, i: usize) -> CVector {
        let mut v = CVector::zeros(self.rank());
        v[i] = Cx::new(1.0, 0.0);
        v
    }

    pub fn unit_vector(&self) -> Result<CVector> {
        self.unit
            .map(|u| self.basis_vector(u))
            .ok_or_else(|| GmError::UnsupportedSpace(format!("{} has no unit", self.kind)))
    }

    /// Matrix of `x cup -` for a real class `x`.
    pub fn cup_matrix_real(&self, x: &[f64]) -> CMatrix {
        let n = self.rank();
        let mut m = CMatrix::zeros(n, n);
        for (a, xa) in x.iter().enumerate() {
            if *xa == 0.0 {
                continue;
            }
            for b in 0..n {
                for (c, v) in self.cup[a][b].iter().enumerate() {
                    m[(c, b)] += Cx::new(xa * v, 0.0);
                }
            }
        }
        m
    }

    /// Matrix of `x cup -` for a complex class `x`.
    pub fn cup_matrix(&self, x: &CVector) -> CMatrix {
        let n = self.rank();
        let mut m = CMatrix::zeros(n, n);
        for a in 0..n {
            if x[a] == Cx::new(0.0, 0.0) {
                continue;
            }
            for b in 0..n {
                for (c, v) in self.cup[a][b].iter().enumerate() {
                    m[(c, b)] += x[a] * *v;
                }
            }
        }
        m
    }

    pub fn cup_product(&self, a: &CVector, b: &CVector) -> CVector {
        self.cup_matrix(a) * b
    }

    pub fn pairing_c(&self) -> CMatrix {
        self.pairing.map(|x| Cx::new(x, 0.0))
    }

    /// Bilinear Poincare pairing `(a, b)`.
    pub fn poincare(&self, a: &CVector, b: &CVector) -> Cx {
        (a.transpose() * self.pairing_c() * b)[(0, 0)]
    }

    /// Integral over the fundamental class; needs a unit.
    pub fn integrate(&self, a: &CVector) -> Result<Cx> {
        Ok(self.poincare(&self.unit_vector()?, a))
    }

    /// Adjoint with respect to the pairing: `(A x, y) = (x, A^dag y)`.
    pub fn adjoint(&self, a: &CMatrix) -> CMatrix {
        let g = self.pairing_c();
        let ginv = g.clone().try_inverse().expect("pairing is non-degenerate");
        ginv * a.transpose() * g
    }

    /// The grading-shift operator with `Delta(e^k) = -k e^k` on exceptional
    /// classes and zero on pulled-back classes.
    pub fn delta_operator(&self) -> Result<CMatrix> {
        let n = self.rank();
        let mut d = CMatrix::zeros(n, n);
        match self.kind {
            SpaceKind::BlProj(m) => {
                for k in 1..m {
                    d[(m + k, m + k)] = Cx::new(-(k as f64), 0.0);
                }
            }
            SpaceKind::TwistedE(_) => {
                for a in 0..n {
                    d[(a, a)] = Cx::new(-((a + 1) as f64), 0.0);
                }
            }
            SpaceKind::Proj(_) => return Err(GmError::UnsupportedSpace("Delta is defined for the blowup models".into())),
        }
        Ok(d)
    }

    /// Evaluate the power series `sum_k coeffs[k] x^k` at a nilpotent class
    /// `x` with zero constant part, returning a class.
    pub fn power_series_at(&self, coeffs: &[Cx], x: &CVector) -> Result<CVector> {
        let m = self.cup_matrix(x);
        let mut v = self.unit_vector()?;
        let mut out = v.clone() * coeffs[0];
        for c in coeffs.iter().skip(1) {
            v = &m * v;
            out += &v * *c;
        }
        Ok(out)
    }

    /// `exp(x)` for a class with zero constant part.
    pub fn exp_class(&self, x: &CVector) -> Result<CVector> {
        let mut coeffs = Vec::with_capacity(self.dim + 2);
        let mut f = 1.0;
        for k in 0..=self.dim + 1 {
            if k > 0 {
                f *= k as f64;
            }
            coeffs.push(Cx::new(1.0 / f, 0.0));
        }
        self.power_series_at(&coeffs, x)
    }

    /// Multiply the degree-`k` component by `s^k`.
    pub fn degree_scale(&self, v: &CVector, s: Cx) -> CVector {
        CVector::from_iterator(self.rank(), v.iter().enumerate().map(|(i, c)| c * s.powu(self.degrees[i] as u32)))
    }
}
