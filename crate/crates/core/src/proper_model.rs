//! The proper-vector model: the spinor `η` whose symmetric square encodes a
//! pair of orthogonal proper vectors `(c⃗, b⃗)` of equal length.
//!
//! The space is parameterized by `b⃗`. The canonical form of the field is
//!
//! ```text
//! η^σ = ( σ·√(b − ρ_b)·e^{−iγ/2},  √(b + ρ_b)·e^{+iγ/2} ),   σ = sign(b₃)
//! ```
//!
//! with `σ = +1` on the plane `b₃ = 0`, where the first component vanishes and
//! the field is continuous.

use num_complex::Complex64;

use crate::pseudo_model::{half_angle_phase, polar_from_xi, BranchContext};
use crate::{Error, Result, Spinor, Vec3};

/// `σ = ±1`, the half-space a proper vector lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfSpaceSign {
    Plus,
    Minus,
}

impl HalfSpaceSign {
    /// Sign of `x₃`, with `+1` on the plane.
    pub fn of(x3: f64) -> Self {
        if x3 < 0.0 {
            HalfSpaceSign::Minus
        } else {
            HalfSpaceSign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            HalfSpaceSign::Plus => 1.0,
            HalfSpaceSign::Minus => -1.0,
        }
    }
}

/// The vector pair read off the symmetric square `η ⊗ η = (cⱼ + i bⱼ)σʲ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProperPairState {
    pub cvec: Vec3,
    pub bvec: Vec3,
}

impl ProperPairState {
    pub fn b(&self) -> f64 {
        self.bvec.norm()
    }

    pub fn rho_b(&self) -> f64 {
        self.bvec.x.hypot(self.bvec.y)
    }
}

/// `f⃗` and `e⃗_f`, the `κ = 0` values of `b⃗` and `c⃗`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVectors {
    pub fvec: Vec3,
    pub efvec: Vec3,
}

/// Vector pair of `η = (N e^{in}, M e^{im})`.
pub fn pair_from_eta(s: &Spinor) -> ProperPairState {
    let p = polar_from_xi(s);
    let (nn, mm) = (p.first_modulus * p.first_modulus, p.second_modulus * p.second_modulus);
    let nm = p.first_modulus * p.second_modulus;
    let (n, m) = (p.first_phase, p.second_phase);
    let cvec = Vec3::new(
        0.5 * (-mm * (2.0 * m).sin() + nn * (2.0 * n).sin()),
        0.5 * (mm * (2.0 * m).cos() + nn * (2.0 * n).cos()),
        -nm * (m + n).sin(),
    );
    let bvec = Vec3::new(
        0.5 * (mm * (2.0 * m).cos() - nn * (2.0 * n).cos()),
        0.5 * (mm * (2.0 * m).sin() + nn * (2.0 * n).sin()),
        nm * (m + n).cos(),
    );
    ProperPairState { cvec, bvec }
}

/// Frame `(f⃗, e⃗_f)` and the pair `c⃗ = e⃗_f cos κ − f⃗ sin κ`,
/// `b⃗ = e⃗_f sin κ + f⃗ cos κ`.
pub fn frame_from_params(
    first_modulus: f64,
    second_modulus: f64,
    gamma: f64,
    kappa: f64,
) -> Result<(FrameVectors, ProperPairState)> {
    if !(first_modulus >= 0.0) || !(second_modulus >= 0.0) {
        return Err(Error::Validation("moduli N, M must be non-negative".into()));
    }
    let (nn, mm) = (first_modulus * first_modulus, second_modulus * second_modulus);
    let half_diff = 0.5 * (mm - nn);
    let length = 0.5 * (mm + nn);
    let (sin_g, cos_g) = gamma.sin_cos();
    let fvec = Vec3::new(
        half_diff * cos_g,
        half_diff * sin_g,
        first_modulus * second_modulus,
    );
    let efvec = Vec3::new(-length * sin_g, length * cos_g, 0.0);
    let (sin_k, cos_k) = kappa.sin_cos();
    let pair = ProperPairState {
        cvec: efvec * cos_k - fvec * sin_k,
        bvec: efvec * sin_k + fvec * cos_k,
    };
    Ok((FrameVectors { fvec, efvec }, pair))
}

/// `η^σ` at `b⃗` with an explicitly supplied planar angle.
pub fn eta_with_gamma(b: &Vec3, gamma: f64) -> Spinor {
    let rho = b.x.hypot(b.y);
    let plus = b.norm() + rho;
    let minus = if plus > 0.0 { b.z * b.z / plus } else { 0.0 };
    let sigma = HalfSpaceSign::of(b.z).value();
    let phase = half_angle_phase(gamma);
    Spinor::new(phase.conj() * (sigma * minus.sqrt()), phase * plus.sqrt())
}

/// The field `η(b⃗)` under the branch conventions of `ctx`. On the axis the
/// mute angle gives `√|b₃|·(σ e^{−iΓ/2}, e^{+iΓ/2})`.
pub fn eta_from_proper(b: &Vec3, ctx: &BranchContext) -> Spinor {
    if ctx.is_on_axis(b) {
        if b.z.abs() < ctx.axis_threshold(b) {
            return Spinor::ZERO;
        }
        return eta_with_gamma(&Vec3::new(0.0, 0.0, b.z), ctx.mute_angle);
    }
    eta_with_gamma(b, ctx.planar_angle(b.x, b.y))
}

/// `(η ⊗ η)` components `c⃗ + i b⃗` in closed complex form. Used as an
/// independent route to [`pair_from_eta`].
pub fn symmetric_square(s: &Spinor) -> [Complex64; 3] {
    let (x, y) = (s.c1, s.c2);
    let i = Complex64::new(0.0, 1.0);
    [
        i * 0.5 * (y * y - x * x),
        0.5 * (x * x + y * y),
        i * x * y,
    ]
}
