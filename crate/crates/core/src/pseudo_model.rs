//! The pseudo-vector model: the spinor `ξ` whose hermitian square is
//! `a + aⱼσʲ`, its inverse, the polar parameterization `(N, M, n, m)` and the
//! branch conventions for the planar angle `γ`.
//!
//! Off the `a₃` axis the field is
//!
//! ```text
//! ξ = ( √(a + a₃)·e^{−iγ/2},  √(a − a₃)·e^{+iγ/2} ),   e^{iγ} = (a₁ + i a₂)/ρ
//! ```
//!
//! which is defined only up to the choice of `γ` modulo `4π`. A
//! [`BranchContext`] fixes that choice. On the axis `γ` is replaced by the
//! mute angle `Γ` of the context.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::{Error, Result, Spinor, Vec3};

/// Default relative radius of the axis tube.
pub const DEFAULT_AXIS_TOLERANCE: f64 = 1e-12;

/// Sheet of the doubled space, `δ ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sheet {
    First,
    Second,
}

impl Sheet {
    pub fn index(self) -> u8 {
        match self {
            Sheet::First => 1,
            Sheet::Second => 2,
        }
    }

    pub fn other(self) -> Sheet {
        match self {
            Sheet::First => Sheet::Second,
            Sheet::Second => Sheet::First,
        }
    }

    /// Sheet of a lifted planar angle: `γ mod 4π ∈ [0, 2π)` is the first.
    pub fn of_angle(gamma: f64) -> Sheet {
        if gamma.rem_euclid(2.0 * TAU) < TAU {
            Sheet::First
        } else {
            Sheet::Second
        }
    }

    /// Offset added to a principal angle in `[0, 2π)` to land on this sheet.
    pub fn angle_offset(self) -> f64 {
        match self {
            Sheet::First => 0.0,
            Sheet::Second => TAU,
        }
    }
}

/// How the planar angle `γ` of a Cartesian point is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaMode {
    /// `γ ∈ [0, 2π)`, cut on `{a₁ > 0, a₂ = 0}`. The vector-space model.
    PrincipalVector,
    /// `γ ∈ [0, 4π)`; the sheet picks `[0, 2π)` or `[2π, 4π)`.
    PrincipalExtended(Sheet),
    /// Real-valued lift: the representative of the principal angle closest
    /// to the given reference angle.
    RealLift(f64),
}

/// Immutable branch data used whenever a field value is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchContext {
    /// `Γ`, substituted for `γ` on the axis.
    pub mute_angle: f64,
    pub gamma_mode: GammaMode,
    /// Relative axis tube radius: a point is on the axis when
    /// `ρ < axis_tolerance·(1 + |v|)`.
    pub axis_tolerance: f64,
}

impl Default for BranchContext {
    fn default() -> Self {
        Self {
            mute_angle: 0.0,
            gamma_mode: GammaMode::PrincipalVector,
            axis_tolerance: DEFAULT_AXIS_TOLERANCE,
        }
    }
}

impl BranchContext {
    pub fn new(mute_angle: f64, gamma_mode: GammaMode, axis_tolerance: f64) -> Result<Self> {
        let ctx = Self {
            mute_angle,
            gamma_mode,
            axis_tolerance,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mute_angle.is_finite() {
            return Err(Error::Validation("mute angle must be finite".into()));
        }
        if !(self.axis_tolerance > 0.0) || !self.axis_tolerance.is_finite() {
            return Err(Error::Validation("axis tolerance must be positive".into()));
        }
        if let GammaMode::RealLift(hint) = self.gamma_mode {
            if !hint.is_finite() {
                return Err(Error::Validation("lift reference must be finite".into()));
            }
        }
        Ok(())
    }

    /// Same context with the real-lift reference angle `hint`.
    pub fn lifted(&self, hint: f64) -> Self {
        Self {
            gamma_mode: GammaMode::RealLift(hint),
            ..*self
        }
    }

    pub fn axis_threshold(&self, v: &Vec3) -> f64 {
        self.axis_tolerance * (1.0 + v.norm())
    }

    pub fn is_on_axis(&self, v: &Vec3) -> bool {
        v.x.hypot(v.y) < self.axis_threshold(v)
    }

    /// `γ` of the planar direction `(x₁, x₂)` under this context's mode.
    pub fn planar_angle(&self, x1: f64, x2: f64) -> f64 {
        let principal = principal_angle(x1, x2);
        match self.gamma_mode {
            GammaMode::PrincipalVector => principal,
            GammaMode::PrincipalExtended(sheet) => principal + sheet.angle_offset(),
            GammaMode::RealLift(hint) => nearest_translate(principal, hint),
        }
    }

    /// `γ` for a point, or `Γ` when the point lies on the axis.
    pub fn gamma_at(&self, v: &Vec3) -> f64 {
        if self.is_on_axis(v) {
            self.mute_angle
        } else {
            self.planar_angle(v.x, v.y)
        }
    }
}

/// `atan2(x₂, x₁)` mapped into `[0, 2π)`.
pub fn principal_angle(x1: f64, x2: f64) -> f64 {
    let angle = x2.atan2(x1);
    if angle < 0.0 {
        let wrapped = angle + TAU;
        // −tiny + 2π can round to 2π
        if wrapped >= TAU {
            wrapped - TAU
        } else {
            wrapped
        }
    } else {
        angle
    }
}

/// The translate `angle + 2πk` closest to `reference`.
pub fn nearest_translate(angle: f64, reference: f64) -> f64 {
    angle + TAU * ((reference - angle) / TAU).round()
}

/// A real 3-vector of the pseudo-vector space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoVectorState(pub Vec3);

impl PseudoVectorState {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self(Vec3::new(a1, a2, a3))
    }

    pub fn vector(&self) -> &Vec3 {
        &self.0
    }

    /// `a = |a⃗|`.
    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }

    /// `ρ = √(a₁² + a₂²)`.
    pub fn planar_radius(&self) -> f64 {
        self.0.x.hypot(self.0.y)
    }
}

impl From<Vec3> for PseudoVectorState {
    fn from(v: Vec3) -> Self {
        Self(v)
    }
}

/// Region of the pseudo-vector space a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionTag {
    InteriorPlus,
    InteriorMinus,
    Plane,
    AxisPlus,
    AxisMinus,
    Origin,
    /// The half-plane `{a₁ > 0, a₂ = 0}` where the vector-model field is
    /// two-valued. Takes precedence over `Plane`.
    Cut,
}

impl RegionTag {
    pub fn is_axis(self) -> bool {
        matches!(self, RegionTag::AxisPlus | RegionTag::AxisMinus | RegionTag::Origin)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionTag::InteriorPlus => "interior+",
            RegionTag::InteriorMinus => "interior-",
            RegionTag::Plane => "plane",
            RegionTag::AxisPlus => "axis+",
            RegionTag::AxisMinus => "axis-",
            RegionTag::Origin => "origin",
            RegionTag::Cut => "cut",
        }
    }
}

pub fn classify_region(v: &PseudoVectorState, ctx: &BranchContext) -> RegionTag {
    let a = v.vector();
    let tol = ctx.axis_threshold(a);
    if v.planar_radius() < tol {
        if a.z.abs() < tol {
            RegionTag::Origin
        } else if a.z > 0.0 {
            RegionTag::AxisPlus
        } else {
            RegionTag::AxisMinus
        }
    } else if a.y.abs() < tol && a.x > 0.0 {
        RegionTag::Cut
    } else if a.z.abs() < tol {
        RegionTag::Plane
    } else if a.z > 0.0 {
        RegionTag::InteriorPlus
    } else {
        RegionTag::InteriorMinus
    }
}

/// `(r + z, r − z)` for `r = √(ρ² + z²)`, with the smaller one taken from
/// `ρ²/(larger)` to avoid cancellation.
pub(crate) fn split_moduli(rho_sqr: f64, z: f64) -> (f64, f64) {
    let r = (rho_sqr + z * z).sqrt();
    if r == 0.0 {
        return (0.0, 0.0);
    }
    if z >= 0.0 {
        let plus = r + z;
        (plus, rho_sqr / plus)
    } else {
        let minus = r - z;
        (rho_sqr / minus, minus)
    }
}

pub(crate) fn half_angle_phase(gamma: f64) -> Complex64 {
    Complex64::from_polar(1.0, 0.5 * gamma)
}

/// `ξ` at `a` with an explicitly supplied planar angle `γ`.
///
/// This is the field on the real-lift cover: `γ` and `γ + 2π` give opposite
/// spinors, `γ` and `γ + 4π` give the same one.
pub fn xi_with_gamma(a: &Vec3, gamma: f64) -> Spinor {
    let (plus, minus) = split_moduli(a.x * a.x + a.y * a.y, a.z);
    let phase = half_angle_phase(gamma);
    Spinor::new(phase.conj() * plus.sqrt(), phase * minus.sqrt())
}

/// The field `ξ(a⃗)` under the branch conventions of `ctx`.
pub fn xi_from_pseudo(v: &PseudoVectorState, ctx: &BranchContext) -> Spinor {
    let a = v.vector();
    if ctx.is_on_axis(a) {
        if a.z.abs() < ctx.axis_threshold(a) {
            return Spinor::ZERO;
        }
        return xi_with_gamma(&Vec3::new(0.0, 0.0, a.z), ctx.mute_angle);
    }
    xi_with_gamma(a, ctx.planar_angle(a.x, a.y))
}

/// Hermitian square `ξ ⊗ ξ* = a + aⱼσʲ`, returned as `(a, a⃗)`.
pub fn pseudo_from_xi(s: &Spinor) -> (f64, Vec3) {
    let (x, y) = (s.c1, s.c2);
    let cross = x.conj() * y;
    let (xx, yy) = (x.norm_sqr(), y.norm_sqr());
    (0.5 * (xx + yy), Vec3::new(cross.re, cross.im, 0.5 * (xx - yy)))
}

/// `ξ = (N e^{in}, M e^{im})`, with `κ = m + n` and `γ = m − n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSpinorParams {
    /// `N`
    pub first_modulus: f64,
    /// `M`
    pub second_modulus: f64,
    /// `n`
    pub first_phase: f64,
    /// `m`
    pub second_phase: f64,
    /// The first component vanishes and `n` carries no information.
    pub first_phase_mute: bool,
    pub second_phase_mute: bool,
}

impl PolarSpinorParams {
    pub fn new(first_modulus: f64, second_modulus: f64, first_phase: f64, second_phase: f64) -> Result<Self> {
        if !(first_modulus >= 0.0) || !(second_modulus >= 0.0) {
            return Err(Error::Validation("moduli N, M must be non-negative".into()));
        }
        for phase in [first_phase, second_phase] {
            if !(-PI..=PI).contains(&phase) {
                return Err(Error::Validation(format!("phase {phase} outside [−π, π]")));
            }
        }
        Ok(Self {
            first_modulus,
            second_modulus,
            first_phase,
            second_phase,
            first_phase_mute: first_modulus == 0.0,
            second_phase_mute: second_modulus == 0.0,
        })
    }

    /// `κ = m + n`
    pub fn kappa(&self) -> f64 {
        self.second_phase + self.first_phase
    }

    /// `γ = m − n`
    pub fn gamma(&self) -> f64 {
        self.second_phase - self.first_phase
    }
}

/// `e^{iκ/2}·(N e^{−iγ/2}, M e^{+iγ/2})`; the `κ` phase is dropped when
/// `include_kappa_phase` is false.
pub fn xi_from_polar(p: &PolarSpinorParams, include_kappa_phase: bool) -> Spinor {
    let phase = half_angle_phase(p.gamma());
    let s = Spinor::new(phase.conj() * p.first_modulus, phase * p.second_modulus);
    if include_kappa_phase {
        s.scale(half_angle_phase(p.kappa()))
    } else {
        s
    }
}

pub fn polar_from_xi(s: &Spinor) -> PolarSpinorParams {
    let (first_modulus, second_modulus) = (s.c1.norm(), s.c2.norm());
    let first_phase_mute = first_modulus == 0.0;
    let second_phase_mute = second_modulus == 0.0;
    PolarSpinorParams {
        first_modulus,
        second_modulus,
        first_phase: if first_phase_mute { 0.0 } else { s.c1.arg() },
        second_phase: if second_phase_mute { 0.0 } else { s.c2.arg() },
        first_phase_mute,
        second_phase_mute,
    }
}
