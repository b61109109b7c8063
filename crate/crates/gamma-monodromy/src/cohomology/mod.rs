//! Classical cohomology models, K-theory classes and the Gamma-integral structure.

pub mod classes;
pub mod space;

pub use classes::{
    chern_character, euler_pairing, exceptional_part, gamma_class, hrr_chi, intersection_pairing, psi_map, todd_class,
    KClass, LineBundle,
};
pub use space::{SpaceKind, SpaceModel};
