//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Failures reported by the numerical and algebraic routines.
#[derive(Debug, Error)]
pub enum GmError {
    #[error("argument {z} is a pole")]
    Pole { z: Complex64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is singular or numerically rank deficient (condition estimate {cond:.3e})")]
    SingularMatrix { cond: f64 },

    #[error("expected exactly one eigenvalue near -1, found {count}")]
    EigenAmbiguity { count: usize },

    #[error("ODE step size underflow at lambda = {at}")]
    StepUnderflow { at: Complex64 },

    #[error("series did not converge after {terms} terms (last relative term {last:.3e})")]
    NonConvergence { terms: usize, last: f64 },

    #[error("lambda = {lambda} lies inside the convergence guard radius {radius:.4}")]
    OutsideConvergence { lambda: Complex64, radius: f64 },

    #[error("operation not supported for space {0}")]
    UnsupportedSpace(String),

    #[error("fit quality too low: R^2 = {r2:.6}")]
    PoorFit { r2: f64 },

    #[error("non-finite value produced while computing {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, GmError>;
