//! Truncated Taylor series in one complex variable.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as Cx;

/// Coefficients `c[0] + c[1] w + ... + c[N] w^N`, with everything of order
/// `w^{N+1}` discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub coeffs: Vec<Cx>,
}

impl Jet {
    pub fn zero(order: usize) -> Self {
        Jet { coeffs: vec![Cx::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(a: Cx, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.coeffs[0] = a;
        j
    }

    /// The jet of `a + w`.
    pub fn variable(a: Cx, order: usize) -> Self {
        let mut j = Self::constant(a, order);
        if order >= 1 {
            j.coeffs[1] = Cx::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(coeffs: Vec<Cx>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> Cx {
        self.coeffs[0]
    }

    pub fn scale(&self, s: Cx) -> Self {
        Jet { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Substitute `w -> f w`.
    pub fn rescale_variable(&self, f: Cx) -> Self {
        let mut p = Cx::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * p;
                p *= f;
                out
            })
            .collect();
        Jet { coeffs }
    }

    /// Multiplicative inverse; the constant term must be non-zero.
    pub fn recip(&self) -> Self {
        let n = self.order();
        let a0 = self.coeffs[0];
        let mut out = vec![Cx::new(0.0, 0.0); n + 1];
        out[0] = a0.inv();
        for k in 1..=n {
            let mut s = Cx::new(0.0, 0.0);
            for j in 1..=k {
                s += self.coeffs[j] * out[k - j];
            }
            out[k] = -s * out[0];
        }
        Jet { coeffs: out }
    }

    pub fn exp(&self) -> Self {
        // f' = a' f, solved coefficient by coefficient.
        let n = self.order();
        let mut out = vec![Cx::new(0.0, 0.0); n + 1];
        out[0] = self.coeffs[0].exp();
        for k in 1..=n {
            let mut s = Cx::new(0.0, 0.0);
            for j in 1..=k {
                s += self.coeffs[j] * out[k - j] * j as f64;
            }
            out[k] = s / k as f64;
        }
        Jet { coeffs: out }
    }

    /// Principal logarithm of the constant term plus the series part.
    pub fn ln(&self) -> Self {
        let n = self.order();
        let a0 = self.coeffs[0];
        let mut out = vec![Cx::new(0.0, 0.0); n + 1];
        out[0] = a0.ln();
        for k in 1..=n {
            let mut s = self.coeffs[k] * k as f64;
            for j in 1..k {
                s -= out[j] * self.coeffs[k - j] * j as f64;
            }
            out[k] = s / (a0 * k as f64);
        }
        Jet { coeffs: out }
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Jet::constant(Cx::new(1.0, 0.0), self.order());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet { coeffs: (0..=n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet { coeffs: (0..=n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        let mut out = vec![Cx::new(0.0, 0.0); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Jet { coeffs: out }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Cx::new(-1.0, 0.0))
    }
}
