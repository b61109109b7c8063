//! Quantum cohomology periods of projective spaces and of the blowup of
//! projective space at a point, their monodromy around the discriminant, and
//! the Mellin-Barnes description of the same periods.

pub mod cohomology;
pub mod error;
pub mod gathmann;
pub mod mirror;
pub mod monodromy;
pub mod numerics;
pub mod periods;
pub mod quantum;

pub use error::{GmError, Result};
