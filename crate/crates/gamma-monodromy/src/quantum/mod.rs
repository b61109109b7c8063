//! Small quantum products, discriminants and closed-form calibrations.

pub mod blowup;
pub mod product;
pub mod series;

pub use blowup::{blowup_calibration, BlowupCalibration};
pub use product::{discriminant_proj, discriminant_twisted, quantum_mult_proj, quantum_mult_twisted, QuantumProduct};
pub use series::{
    s_from_inverse, s_inverse_blowup_unit, s_inverse_proj, s_inverse_proj_column, s_inverse_twisted,
    s_inverse_twisted_column, symplectic_defect, twisted_divisor_defect, twisted_homogeneity_defect, SSeries,
};
