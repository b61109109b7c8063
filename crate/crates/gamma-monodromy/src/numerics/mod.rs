//! Numerical building blocks: special functions, jets, small matrices,
//! quadrature nodes and path-following ODE integration.

pub mod jet;
pub mod linalg;
pub mod ode;
pub mod special;

pub use jet::Jet;
pub use linalg::{cx, eig_unit_minus, expm, identity, inverse, max_abs, CMatrix, CVector};
pub use ode::{branch_power, circle, ode_continue, BranchState, OdeOptions, OdeOutcome, PathPiece, PathSpec};
pub use special::{gamma, log_gamma, polygamma, recip_gamma_jet};
