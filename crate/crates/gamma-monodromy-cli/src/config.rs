//! Parsing and validation of command-line values.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as Cx;
use serde::Serialize;

/// Allowed range for `--tol`.
pub const TOL_MIN: f64 = 1e-12;
pub const TOL_MAX: f64 = 1e-3;

/// A space named on the command line as `proj:m`, `twisted:n` or `blproj:n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceSpec {
    /// `P^m`, whose periods belong to the `n = m + 2` family.
    Proj(usize),
    /// Twisted model of the exceptional divisor of `Bl P^n`.
    Twisted(usize),
    BlProj(usize),
}

impl SpaceSpec {
    /// The index `n` shared by the projective and twisted families.
    pub fn family_n(self) -> usize {
        match self {
            SpaceSpec::Proj(m) => m + 2,
            SpaceSpec::Twisted(n) | SpaceSpec::BlProj(n) => n,
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, num) = s.split_once(':').ok_or_else(|| format!("space `{s}` must look like proj:m, twisted:n or blproj:n"))?;
        let v: usize = num.parse().map_err(|_| format!("`{num}` is not a non-negative integer"))?;
        match kind {
            "proj" if (1..=8).contains(&v) => Ok(SpaceSpec::Proj(v)),
            "twisted" if (3..=10).contains(&v) => Ok(SpaceSpec::Twisted(v)),
            "blproj" if (2..=10).contains(&v) => Ok(SpaceSpec::BlProj(v)),
            "proj" => Err(format!("proj:{v} is outside proj:1 .. proj:8")),
            "twisted" => Err(format!("twisted:{v} is outside twisted:3 .. twisted:10")),
            "blproj" => Err(format!("blproj:{v} is outside blproj:2 .. blproj:10")),
            _ => Err(format!("unknown space kind `{kind}`")),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Proj(m) => write!(f, "proj:{m}"),
            SpaceSpec::Twisted(n) => write!(f, "twisted:{n}"),
            SpaceSpec::BlProj(n) => write!(f, "blproj:{n}"),
        }
    }
}

/// A nonzero complex parameter given as modulus and argument (in units of pi).
/// The argument selects the branch of the logarithm and is never inferred.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PolarParam {
    pub modulus: f64,
    pub arg_pi: f64,
}

impl PolarParam {
    pub fn new(modulus: f64, arg_pi: f64) -> Result<Self, String> {
        if !(modulus.is_finite() && modulus > 0.0) {
            return Err(format!("modulus {modulus} must be a positive finite number"));
        }
        if !arg_pi.is_finite() {
            return Err("argument must be finite".into());
        }
        Ok(PolarParam { modulus, arg_pi })
    }

    pub fn log(&self) -> Cx {
        Cx::new(self.modulus.ln(), PI * self.arg_pi)
    }
}

pub fn check_tol(tol: f64) -> Result<f64, String> {
    if (TOL_MIN..=TOL_MAX).contains(&tol) {
        Ok(tol)
    } else {
        Err(format!("tol {tol:e} is outside [{TOL_MIN:e}, {TOL_MAX:e}]"))
    }
}

/// Integration tolerance used when the reported residuals must stay below `tol`.
pub fn integration_tol(tol: f64) -> f64 {
    (tol * 1e-3).clamp(1e-12, 1e-10)
}
