//! Map between the pseudo-vector spinor `ξ` and the proper-vector spinor `η`.
//!
//! ```text
//! η₁ = (ξ₁ − ξ₂*)/√2,   η₂ = (ξ₁* + ξ₂)/√2
//! ξ₁ = (η₁ + η₂*)/√2,   ξ₂ = (η₂ − η₁*)/√2
//! ```
//!
//! Both maps contain complex conjugation and are therefore only real-linear;
//! they reverse the parity character of the model. The pair `(s, iσ²s*)`
//! carries non-equivalent representations of the extended group.
//!
//! The compact matrix form `(s − iσ²s*)/√2` is not used: with the usual
//! `σ² = [[0, −i], [i, 0]]` it does not reproduce these component formulas.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::Spinor;

pub fn xi_to_eta(s: &Spinor) -> Spinor {
    Spinor::new(
        (s.c1 - s.c2.conj()) * FRAC_1_SQRT_2,
        (s.c1.conj() + s.c2) * FRAC_1_SQRT_2,
    )
}

pub fn eta_to_xi(s: &Spinor) -> Spinor {
    Spinor::new(
        (s.c1 + s.c2.conj()) * FRAC_1_SQRT_2,
        (s.c2 - s.c1.conj()) * FRAC_1_SQRT_2,
    )
}
