//! Finite-temperature Casimir interaction between metal surfaces in the
//! Lifshitz theory, under competing descriptions of the metal (Drude,
//! plasma, infrared surface impedance, ideal metal and the modified ideal
//! metal), with an entropy/Nernst checker and a theory-versus-experiment
//! comparison harness.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod error;
pub mod lifshitz;
pub mod materials;
pub mod numerics;
pub mod reflection;
pub mod thermo;

#[cfg(test)]
mod cross_checks;

pub use error::{Error, Result};
pub use lifshitz::{EvaluationPoint, Geometry, LifshitzResult, PressureResult};
pub use materials::{BoundaryModel, MaterialSpec};
pub use numerics::{QuadratureSpec, CONSTANTS, ZETA3};
pub use reflection::ReflectionPair;
