//! Spatial spinor fields over a double-covered 3-space.
//!
//! Two square roots of a real 3-vector are modelled here: the spinor `ξ` of a
//! pseudo vector (hermitian square `ξ ⊗ ξ*`) and the spinor `η` of a proper
//! vector (symmetric square `η ⊗ η`). Around them the crate provides
//!
//! * [`algebra`]: the extended unitary group, its SU(2) and SO(3) matrices and
//!   the parity action,
//! * [`pseudo_model`] / [`proper_model`]: the two fields, their inverses and
//!   branch bookkeeping,
//! * [`model_map`]: the conjugation map between the two fields,
//! * [`calculus`]: gradients, modified Cauchy–Riemann residuals and
//!   asymptotics near the singular sets,
//! * [`charts`]: cylindrical parabolic, parabolic and spherical charts with
//!   their doubled parameter domains,
//! * [`transport`]: continuation of a spinor along a path in the covering
//!   space.

pub mod algebra;
pub mod calculus;
pub mod charts;
mod error;
pub mod model_map;
pub mod proper_model;
pub mod pseudo_model;
pub mod transport;

pub use algebra::{GroupElement, Parity, Rotation3, Spinor, SpinorType};
pub use error::{Error, Result};
pub use pseudo_model::{BranchContext, GammaMode, RegionTag, Sheet};

use nalgebra::Vector3;

/// Real 3-vector used for points and vector pairs throughout the crate.
pub type Vec3 = Vector3<f64>;

/// Which of the two spinor fields is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldModel {
    /// `ξ`, the square root of a pseudo vector.
    Pseudo,
    /// `η`, the square root of a proper vector.
    Proper,
}
