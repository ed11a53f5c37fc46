//! Planar derivatives of `ξ` and `η`.
//!
//! Derivatives are taken in the `(x₁, x₂)` plane with `x₃` held fixed. Both
//! fields have diagonal logarithmic derivatives: along a planar direction `n`
//!
//! ```text
//! ∇ₙ ln ξ¹ = ½[(n·a)/(a(a + a₃)) + i(n×a)/ρ²]     ∇ₙ ln ξ² = ½[(n·a)/(a(a − a₃)) − i(n×a)/ρ²]
//! ∇ₙ ln η¹ = (1/2ρ)[−(n·b)/b + i(n×b)/ρ]          ∇ₙ ln η² = (1/2ρ)[(n·b)/b − i(n×b)/ρ]
//! ```
//!
//! where `n·a = n₁a₁ + n₂a₂` and `n×a = n₁a₂ − n₂a₁`. The diagonal matrix of
//! these is the connection matrix, independent of the branch of `γ`.
//!
//! The fields are not holomorphic in `x₁ + ix₂`. [`cr_residual_xi`] and
//! [`cr_residual_eta`] return the Cauchy–Riemann defects
//! `D₁ + iD₂ = ∂₁f + i∂₂f` for each component.
//!
//! Near the axis, the origin, the cut and at infinity the derivatives blow up
//! or become two-valued. [`singular_dir_deriv`] gives their expansion in a
//! small parameter `ε`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use std::f64::consts::SQRT_2;

use crate::charts::{xi_in_chart, eta_in_chart, ChartId, ChartPoint};
use crate::proper_model::{eta_from_proper, eta_with_gamma, HalfSpaceSign};
use crate::pseudo_model::{
    classify_region, split_moduli, xi_from_pseudo, xi_with_gamma, PseudoVectorState,
};
use crate::{BranchContext, Error, FieldModel, RegionTag, Result, Spinor, Vec3};

/// Tolerance on `|m₂|` when deciding that an approach direction runs along
/// the cut.
pub const CUT_DIRECTION_TOLERANCE: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Unit direction in the `(x₁, x₂)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction2 {
    n1: f64,
    n2: f64,
}

fn normalize(x: f64, y: f64, what: &str) -> Result<(f64, f64)> {
    let len = x.hypot(y);
    if !len.is_finite() || len == 0.0 {
        return Err(Error::Validation(format!("{what} must be a finite non-zero planar vector")));
    }
    Ok((x / len, y / len))
}

impl Direction2 {
    /// Normalizes `(n₁, n₂)`.
    pub fn new(n1: f64, n2: f64) -> Result<Self> {
        let (n1, n2) = normalize(n1, n2, "direction")?;
        Ok(Self { n1, n2 })
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { n1: c, n2: s }
    }

    pub fn n1(&self) -> f64 {
        self.n1
    }

    pub fn n2(&self) -> f64 {
        self.n2
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.n1, self.n2]
    }
}

/// Direction `m` along which a singular point is approached, with
/// `e^{iμ} = m₁ + i m₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproachDirection {
    m1: f64,
    m2: f64,
    mu: f64,
}

impl ApproachDirection {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        let (m1, m2) = normalize(m1, m2, "approach direction")?;
        Ok(Self { m1, m2, mu: m2.atan2(m1) })
    }

    pub fn from_angle(mu: f64) -> Self {
        let (s, c) = mu.sin_cos();
        Self { m1: c, m2: s, mu: s.atan2(c) }
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// `μ ∈ [−π, π]`.
    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Per-component derivative of a spinor along one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalDerivative {
    pub d1: Complex64,
    pub d2: Complex64,
}

impl DirectionalDerivative {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.d1 - other.d1).norm().max((self.d2 - other.d2).norm())
    }

    fn from_log(log: [Complex64; 2], field: &Spinor) -> Self {
        Self {
            d1: log[0] * field.c1,
            d2: log[1] * field.c2,
        }
    }
}

/// `partial[i][j] = ∂sⁱ⁺¹/∂x_{j+1}` for `j ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorGradient {
    pub partial: [[Complex64; 2]; 2],
}

impl SpinorGradient {
    fn from_directional(along_x1: DirectionalDerivative, along_x2: DirectionalDerivative) -> Self {
        Self {
            partial: [[along_x1.d1, along_x2.d1], [along_x1.d2, along_x2.d2]],
        }
    }
}

/// Cauchy–Riemann defects. With `sⁱ = Uⁱ + iVⁱ`:
/// `d1 = ∂U¹/∂x₁ − ∂V¹/∂x₂`, `d2 = ∂U¹/∂x₂ + ∂V¹/∂x₁`, and `d3`, `d4` the
/// same for the second component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CRResidual {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

impl CRResidual {
    pub fn to_array(&self) -> [f64; 4] {
        [self.d1, self.d2, self.d3, self.d4]
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |acc, d| acc.max(d.abs()))
    }
}

/// Expansion `∇ ≈ ε^p (k₋₁/ε + k₀ + k₁ε)` per spinor component, with `p = ½`
/// when `half_power` is set and `p = 0` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticDerivative {
    pub kminus: [Complex64; 2],
    pub kzero: [Complex64; 2],
    pub kplus: [Complex64; 2],
    pub half_power: bool,
    /// Largest `ε` for which the truncation is meant to be used.
    pub valid_below: f64,
}

impl AsymptoticDerivative {
    pub fn eval(&self, eps: f64) -> DirectionalDerivative {
        let prefactor = if self.half_power { eps.sqrt() } else { 1.0 };
        let term = |k: usize| (self.kminus[k] / eps + self.kzero[k] + self.kplus[k] * eps) * prefactor;
        DirectionalDerivative { d1: term(0), d2: term(1) }
    }

    /// Whether component `k` diverges like `1/ε` (before any half power).
    pub fn diverges(&self, k: usize) -> bool {
        self.kminus[k] != Complex64::new(0.0, 0.0)
    }
}

/// Singular sets of the planar derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularSet {
    /// `x₁ = x₂ = 0`, `x₃ ≠ 0`.
    Axis,
    /// The origin approached within the plane `x₃ = 0`.
    PlaneOrigin,
    /// The half-plane `{x₁ > 0, x₂ = 0}` of the vector model.
    Cut,
    /// `ρ → ∞` at fixed `x₃`; the expansion parameter is `ε = 1/ρ`.
    InfiniteBoundary,
}

impl SingularSet {
    pub fn from_region(tag: RegionTag) -> Result<Self> {
        match tag {
            RegionTag::AxisPlus | RegionTag::AxisMinus => Ok(Self::Axis),
            RegionTag::Origin => Ok(Self::PlaneOrigin),
            RegionTag::Cut => Ok(Self::Cut),
            other => Err(Error::Validation(format!(
                "region {} is not a singular set of the derivatives",
                other.as_str()
            ))),
        }
    }
}

fn planar_dot_cross(w: [f64; 2], v: &Vec3) -> (f64, f64) {
    (w[0] * v.x + w[1] * v.y, w[0] * v.y - w[1] * v.x)
}

fn require_off_axis(v: &Vec3, ctx: &BranchContext) -> Result<()> {
    if !v.iter().all(|c| c.is_finite()) {
        return Err(Error::Validation("point must be finite".into()));
    }
    if ctx.is_on_axis(v) {
        return Err(Error::SingularPoint(format!(
            "planar derivatives are singular on the axis at {:?}; use singular_dir_deriv",
            v.as_slice()
        )));
    }
    Ok(())
}

fn log_derivative_xi(a: &Vec3, w: [f64; 2]) -> [Complex64; 2] {
    let rho_sqr = a.x * a.x + a.y * a.y;
    let r = a.norm();
    let (plus, minus) = split_moduli(rho_sqr, a.z);
    let (dot, cross) = planar_dot_cross(w, a);
    [
        Complex64::new(0.5 * dot / (r * plus), 0.5 * cross / rho_sqr),
        Complex64::new(0.5 * dot / (r * minus), -0.5 * cross / rho_sqr),
    ]
}

fn log_derivative_eta(b: &Vec3, w: [f64; 2]) -> [Complex64; 2] {
    let rho = b.x.hypot(b.y);
    let modulus = b.norm();
    let (dot, cross) = planar_dot_cross(w, b);
    let scale = 0.5 / rho;
    [
        Complex64::new(-dot / modulus, cross / rho) * scale,
        Complex64::new(dot / modulus, -cross / rho) * scale,
    ]
}

/// Derivative of `ξ` along an arbitrary (not necessarily unit) planar vector.
/// Linear in `w`.
pub fn planar_deriv_xi(v: &PseudoVectorState, w: [f64; 2], ctx: &BranchContext) -> Result<DirectionalDerivative> {
    require_off_axis(v.vector(), ctx)?;
    let field = xi_from_pseudo(v, ctx);
    Ok(DirectionalDerivative::from_log(log_derivative_xi(v.vector(), w), &field))
}

/// Derivative of `η` along an arbitrary planar vector.
pub fn planar_deriv_eta(b: &Vec3, w: [f64; 2], ctx: &BranchContext) -> Result<DirectionalDerivative> {
    require_off_axis(b, ctx)?;
    let field = eta_from_proper(b, ctx);
    Ok(DirectionalDerivative::from_log(log_derivative_eta(b, w), &field))
}

pub fn dir_deriv_xi(v: &PseudoVectorState, n: Direction2, ctx: &BranchContext) -> Result<DirectionalDerivative> {
    planar_deriv_xi(v, n.as_array(), ctx)
}

pub fn dir_deriv_eta(b: &Vec3, n: Direction2, ctx: &BranchContext) -> Result<DirectionalDerivative> {
    planar_deriv_eta(b, n.as_array(), ctx)
}

pub fn grad_xi(v: &PseudoVectorState, ctx: &BranchContext) -> Result<SpinorGradient> {
    Ok(SpinorGradient::from_directional(
        planar_deriv_xi(v, [1.0, 0.0], ctx)?,
        planar_deriv_xi(v, [0.0, 1.0], ctx)?,
    ))
}

pub fn grad_eta(b: &Vec3, ctx: &BranchContext) -> Result<SpinorGradient> {
    Ok(SpinorGradient::from_directional(
        planar_deriv_eta(b, [1.0, 0.0], ctx)?,
        planar_deriv_eta(b, [0.0, 1.0], ctx)?,
    ))
}

/// Split `n` into the part along the planar projection of `v` (where
/// `n × v = 0`) and the part across it (where `n · v = 0`).
pub fn split_direction(n: Direction2, v: &Vec3) -> Result<([f64; 2], [f64; 2])> {
    let rho = v.x.hypot(v.y);
    if rho == 0.0 || !rho.is_finite() {
        return Err(Error::SingularPoint("no planar direction on the axis".into()));
    }
    let (u1, u2) = (v.x / rho, v.y / rho);
    let along = n.n1 * u1 + n.n2 * u2;
    let parallel = [along * u1, along * u2];
    Ok((parallel, [n.n1 - parallel[0], n.n2 - parallel[1]]))
}

/// `A` with `∇ₙξ = Aξ`.
pub fn connection_matrix(v: &PseudoVectorState, n: Direction2, ctx: &BranchContext) -> Result<Matrix2<Complex64>> {
    require_off_axis(v.vector(), ctx)?;
    let [l1, l2] = log_derivative_xi(v.vector(), n.as_array());
    Ok(Matrix2::new(l1, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), l2))
}

/// The same for `η`.
pub fn connection_matrix_eta(b: &Vec3, n: Direction2, ctx: &BranchContext) -> Result<Matrix2<Complex64>> {
    require_off_axis(b, ctx)?;
    let [l1, l2] = log_derivative_eta(b, n.as_array());
    Ok(Matrix2::new(l1, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), l2))
}

pub fn cr_residual_xi(v: &PseudoVectorState, ctx: &BranchContext) -> Result<CRResidual> {
    let a = v.vector();
    require_off_axis(a, ctx)?;
    let gamma = ctx.gamma_at(a);
    let rho_sqr = a.x * a.x + a.y * a.y;
    let rho = rho_sqr.sqrt();
    let r = a.norm();
    let (plus, minus) = split_moduli(rho_sqr, a.z);
    let first = 0.5 * rho * (1.0 / (r * plus.sqrt()) + plus.sqrt() / rho_sqr);
    // 1/(a√(a−a₃)) − √(a−a₃)/ρ² without cancellation
    let second = 0.5 * a.z * minus.sqrt() / (r * rho);
    let (s1, c1) = (0.5 * gamma).sin_cos();
    let (s3, c3) = (1.5 * gamma).sin_cos();
    Ok(CRResidual {
        d1: first * c1,
        d2: first * s1,
        d3: second * c3,
        d4: second * s3,
    })
}

/// Residuals of `η^σ`. `sigma` must agree with the sign of `b₃` unless
/// `b₃ = 0`, where the first component vanishes.
pub fn cr_residual_eta(b: &Vec3, sigma: HalfSpaceSign, ctx: &BranchContext) -> Result<CRResidual> {
    require_off_axis(b, ctx)?;
    if b.z != 0.0 && HalfSpaceSign::of(b.z) != sigma {
        return Err(Error::Validation(format!(
            "half-space sign {sigma:?} does not match b3 = {}",
            b.z
        )));
    }
    let gamma = ctx.gamma_at(b);
    let rho = b.x.hypot(b.y);
    let modulus = b.norm();
    let plus = modulus + rho;
    let minus = b.z * b.z / plus;
    // 1/ρ − 1/b = (b − ρ)/(ρb)
    let k = minus / (rho * modulus);
    let (s, c) = (0.5 * gamma).sin_cos();
    let first = sigma.value() * minus.sqrt() / (2.0 * rho) * k;
    let second = plus.sqrt() / (2.0 * rho) * k;
    Ok(CRResidual {
        d1: first * (b.x * c + b.y * s),
        d2: first * (b.y * c - b.x * s),
        d3: second * (-b.x * c + b.y * s),
        d4: second * (-b.y * c - b.x * s),
    })
}

fn phase(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Expansion of `∇ₙ` near a singular set.
///
/// * `Axis` (anchor `(0, 0, s)`): point `anchor + ε m`.
/// * `PlaneOrigin` (anchor `0`): point `ε m` in the plane, half power.
/// * `InfiniteBoundary`: point `(m/ε, anchor₃)`, half power.
/// * `Cut` (anchor `(a₁ > 0, 0, a₃)`): the finite one-sided limit of the
///   vector-model field, `sgn(m₂)` times the derivative on the `γ = 0` side.
///
/// Except on the cut the coefficients are those of the branch whose planar
/// angle at the approach points is `μ`.
pub fn singular_dir_deriv(
    set: SingularSet,
    anchor: &Vec3,
    model: FieldModel,
    n: Direction2,
    m: ApproachDirection,
    ctx: &BranchContext,
) -> Result<AsymptoticDerivative> {
    if !anchor.iter().all(|c| c.is_finite()) {
        return Err(Error::Validation("anchor must be finite".into()));
    }
    let along_cut = m.m2.abs() < CUT_DIRECTION_TOLERANCE;
    if along_cut && (set == SingularSet::Cut || m.m1 > 0.0) {
        return Err(Error::Validation(
            "approach direction runs along the cut; the limit is not defined".into(),
        ));
    }
    let (dot, cross) = (n.n1 * m.m1 + n.n2 * m.m2, n.n1 * m.m2 - n.n2 * m.m1);
    let (lower, upper) = (phase(-0.5 * m.mu), phase(0.5 * m.mu));
    let threshold = ctx.axis_threshold(anchor);
    let mut out = AsymptoticDerivative {
        kminus: [ZERO; 2],
        kzero: [ZERO; 2],
        kplus: [ZERO; 2],
        half_power: false,
        valid_below: f64::INFINITY,
    };
    match set {
        SingularSet::Axis => {
            if !ctx.is_on_axis(anchor) || anchor.z.abs() < threshold {
                return Err(Error::Validation("anchor is not an axis point away from the origin".into()));
            }
            let s = anchor.z.abs();
            out.valid_below = 0.1 * s;
            match model {
                FieldModel::Pseudo => {
                    let root = (2.0 * s).sqrt();
                    let s2 = s * s;
                    // the component sitting on the occupied half of the axis diverges
                    let (big, small, big_phase, small_phase, sign) = if anchor.z > 0.0 {
                        (0, 1, lower, upper, 1.0)
                    } else {
                        (1, 0, upper, lower, -1.0)
                    };
                    out.kminus[big] = I * 0.5 * root * big_phase * (sign * cross);
                    out.kplus[big] =
                        big_phase * (0.5 * root) * Complex64::new(dot / (2.0 * s2), sign * cross / (8.0 * s2));
                    out.kzero[small] = small_phase / root * Complex64::new(dot, -0.5 * sign * cross);
                }
                FieldModel::Proper => {
                    let sigma = anchor.z.signum();
                    let root = s.sqrt();
                    let s2 = s * s;
                    out.kminus[0] = I * (sigma * root * 0.5 * cross) * lower;
                    out.kzero[0] = lower * (sigma * root) * Complex64::new(-dot / (2.0 * s), -cross / (4.0 * s));
                    out.kplus[0] = lower * (sigma * root) * Complex64::new(dot / (4.0 * s2), cross / (16.0 * s2));
                    out.kminus[1] = -I * (root * 0.5 * cross) * upper;
                    out.kzero[1] = upper * root * Complex64::new(dot / (2.0 * s), -cross / (4.0 * s));
                    out.kplus[1] = upper * root * Complex64::new(dot / (4.0 * s2), -cross / (16.0 * s2));
                }
            }
        }
        SingularSet::PlaneOrigin => {
            if anchor.norm() >= threshold {
                return Err(Error::Validation("anchor is not the origin".into()));
            }
            out.half_power = true;
            match model {
                FieldModel::Pseudo => {
                    out.kminus[0] = lower * Complex64::new(dot, cross) * 0.5;
                    out.kminus[1] = upper * Complex64::new(dot, -cross) * 0.5;
                }
                FieldModel::Proper => {
                    out.kminus[1] = upper * Complex64::new(dot, -cross) / SQRT_2;
                }
            }
        }
        SingularSet::InfiniteBoundary => {
            let z = anchor.z;
            out.half_power = true;
            out.valid_below = 0.1 / (1.0 + z.abs());
            match model {
                FieldModel::Pseudo => {
                    out.kzero[0] = lower * Complex64::new(dot, cross) * 0.5;
                    out.kplus[0] = lower * Complex64::new(-dot, cross) * (0.25 * z);
                    out.kzero[1] = upper * Complex64::new(dot, -cross) * 0.5;
                    out.kplus[1] = upper * Complex64::new(dot, cross) * (0.25 * z);
                }
                FieldModel::Proper => {
                    out.kplus[0] = lower * Complex64::new(-dot, cross) * (z / (2.0 * SQRT_2));
                    out.kzero[1] = upper * Complex64::new(dot, -cross) / SQRT_2;
                }
            }
        }
        SingularSet::Cut => {
            if classify_region(&PseudoVectorState(*anchor), ctx) != RegionTag::Cut {
                return Err(Error::Validation("anchor is not on the cut".into()));
            }
            out.valid_below = 0.0;
            let sign = m.m2.signum();
            let w = n.as_array();
            let on_cut = Vec3::new(anchor.x, 0.0, anchor.z);
            let limit = match model {
                FieldModel::Pseudo => {
                    DirectionalDerivative::from_log(log_derivative_xi(&on_cut, w), &xi_with_gamma(&on_cut, 0.0))
                }
                FieldModel::Proper => {
                    DirectionalDerivative::from_log(log_derivative_eta(&on_cut, w), &eta_with_gamma(&on_cut, 0.0))
                }
            };
            out.kzero = [limit.d1 * sign, limit.d2 * sign];
        }
    }
    Ok(out)
}

/// Derivative of the chart field along a direction `ν` of the
/// `(y₁, y₂)` plane of the cylindrical parabolic chart:
///
/// ```text
/// ∇_ν ξ¹ = (ξ¹/2)[ρ(ν·y)/(a(a + a₃)) + (i/ρ)(ν×y)],   ρ = (y₁² + y₂²)/2
/// ∇_ν η¹ = (η¹/2)[−(ν·y)/b + (i/ρ)(ν×y)]
/// ```
///
/// and the second components with `a − a₃` and the opposite signs.
pub fn chart_dir_deriv(
    p: &ChartPoint,
    model: FieldModel,
    nu: Direction2,
    ctx: &BranchContext,
) -> Result<DirectionalDerivative> {
    if p.chart() != ChartId::CylindricalParabolic {
        return Err(Error::Validation(
            "chart derivatives are provided for the cylindrical parabolic chart".into(),
        ));
    }
    let [y1, y2, y3] = p.coords();
    if y1 == 0.0 && y2 == 0.0 {
        return Err(Error::SingularPoint("chart derivative is singular at y1 = y2 = 0".into()));
    }
    let rho = 0.5 * (y1 * y1 + y2 * y2);
    let dot = nu.n1 * y1 + nu.n2 * y2;
    let cross = nu.n1 * y2 - nu.n2 * y1;
    let log = match model {
        FieldModel::Pseudo => {
            let r = rho.hypot(y3);
            let (plus, minus) = split_moduli(rho * rho, y3);
            [
                Complex64::new(0.5 * rho * dot / (r * plus), 0.5 * cross / rho),
                Complex64::new(0.5 * rho * dot / (r * minus), -0.5 * cross / rho),
            ]
        }
        FieldModel::Proper => {
            let b = rho.hypot(y3);
            [
                Complex64::new(-0.5 * dot / b, 0.5 * cross / rho),
                Complex64::new(0.5 * dot / b, -0.5 * cross / rho),
            ]
        }
    };
    let field = match model {
        FieldModel::Pseudo => xi_in_chart(p, ctx),
        FieldModel::Proper => eta_in_chart(p, ctx),
    };
    Ok(DirectionalDerivative::from_log(log, &field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::DomainVariant;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn ctx() -> BranchContext {
        BranchContext::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    /// Central difference of a field along planar `w`, with `γ` lifted
    /// continuously from the base point.
    fn fd<F: Fn(&Vec3, &BranchContext) -> Spinor>(field: F, x: &Vec3, w: [f64; 2], base: &BranchContext) -> DirectionalDerivative {
        let h = 1e-6 * (1.0 + x.norm());
        let lift = base.lifted(base.gamma_at(x));
        let step = Vec3::new(w[0] * h, w[1] * h, 0.0);
        let fwd = field(&(x + step), &lift);
        let bwd = field(&(x - step), &lift);
        DirectionalDerivative {
            d1: (fwd.c1 - bwd.c1) / (2.0 * h),
            d2: (fwd.c2 - bwd.c2) / (2.0 * h),
        }
    }

    fn xi_field(x: &Vec3, ctx: &BranchContext) -> Spinor {
        xi_from_pseudo(&PseudoVectorState(*x), ctx)
    }

    fn fd_residual(d_x1: DirectionalDerivative, d_x2: DirectionalDerivative) -> [f64; 4] {
        let first = d_x1.d1 + I * d_x2.d1;
        let second = d_x1.d2 + I * d_x2.d2;
        [first.re, first.im, second.re, second.im]
    }

    #[test]
    fn xi_gradient_examples() {
        let v = PseudoVectorState::new(1.0, 0.0, 0.0);
        let g = grad_xi(&v, &ctx()).unwrap();
        assert!(close(g.partial[0][0], c(0.5, 0.0), 1e-15));
        assert!(close(g.partial[1][0], c(0.5, 0.0), 1e-15));
        assert!(close(g.partial[0][1], c(0.0, -0.5), 1e-15));
        assert!(close(g.partial[1][1], c(0.0, 0.5), 1e-15));
        let fd1 = fd(xi_field, v.vector(), [1.0, 0.0], &ctx());
        let fd2 = fd(xi_field, v.vector(), [0.0, 1.0], &ctx());
        assert!(close(fd1.d1, c(0.5, 0.0), 1e-8) && close(fd1.d2, c(0.5, 0.0), 1e-8));
        assert!(close(fd2.d1, c(0.0, -0.5), 1e-8) && close(fd2.d2, c(0.0, 0.5), 1e-8));
        let err = grad_xi(&PseudoVectorState::new(0.0, 0.0, 1.0), &ctx()).unwrap_err();
        assert!(matches!(err, Error::SingularPoint(_)));
    }

    #[test]
    fn xi_directional_examples() {
        let v = PseudoVectorState::new(1.0, 0.0, 0.0);
        let d = dir_deriv_xi(&v, Direction2::new(0.0, 1.0).unwrap(), &ctx()).unwrap();
        assert!(close(d.d1, c(0.0, -0.5), 1e-15) && close(d.d2, c(0.0, 0.5), 1e-15));
        let d = dir_deriv_xi(&v, Direction2::new(1.0, 0.0).unwrap(), &ctx()).unwrap();
        assert!(close(d.d1, c(0.5, 0.0), 1e-15) && close(d.d2, c(0.5, 0.0), 1e-15));
    }

    #[test]
    fn perpendicular_motion_keeps_modulus_to_second_order() {
        let a = Vec3::new(0.6, 0.8, 0.3);
        let n = [-0.8, 0.6];
        let base = xi_field(&a, &ctx()).norm();
        let deviation = |eps: f64| (xi_field(&(a + Vec3::new(n[0] * eps, n[1] * eps, 0.0)), &ctx()).norm() - base).abs();
        let (e1, e2) = (deviation(1e-3), deviation(5e-4));
        assert!(e1 < 1e-5);
        assert!((e1 / e2 - 4.0).abs() < 0.1, "{e1} {e2}");
    }

    #[test]
    fn eta_gradient_examples() {
        let b = Vec3::new(1.0, 0.0, 0.0);
        let d = dir_deriv_eta(&b, Direction2::new(1.0, 0.0).unwrap(), &ctx()).unwrap();
        assert!(close(d.d2, c(SQRT_2 / 2.0, 0.0), 1e-15));
        assert_eq!(d.d1, ZERO);
        let f = fd(eta_from_proper, &b, [1.0, 0.0], &ctx());
        assert!(close(f.d2, c(SQRT_2 / 2.0, 0.0), 1e-8));
        let g = grad_eta(&b, &ctx()).unwrap();
        assert_eq!(g.partial[0], [ZERO, ZERO]);
        assert!(matches!(grad_eta(&Vec3::new(0.0, 0.0, 1.0), &ctx()), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn eta_plane_form() {
        // ∇ₙη² = η²(n·b − i n×b)/(2ρ²) on b₃ = 0
        let b = Vec3::new(1.2, -0.7, 0.0);
        let n = Direction2::from_angle(0.4);
        let d = dir_deriv_eta(&b, n, &ctx()).unwrap();
        let eta = eta_from_proper(&b, &ctx());
        let (dot, cross) = planar_dot_cross(n.as_array(), &b);
        let rho_sqr = b.x * b.x + b.y * b.y;
        assert!(close(d.d2, eta.c2 * c(dot, -cross) / (2.0 * rho_sqr), 1e-14));
    }

    #[test]
    fn connection_matrix_examples() {
        let v = PseudoVectorState::new(1.0, 0.0, 0.0);
        let a = connection_matrix(&v, Direction2::new(1.0, 0.0).unwrap(), &ctx()).unwrap();
        assert!(close(a[(0, 0)], c(0.5, 0.0), 1e-15) && close(a[(1, 1)], c(0.5, 0.0), 1e-15));
        assert_eq!(a[(0, 1)], ZERO);
        let a = connection_matrix(&v, Direction2::new(0.0, 1.0).unwrap(), &ctx()).unwrap();
        assert!(close(a[(0, 0)], c(0.0, -0.5), 1e-15) && close(a[(1, 1)], c(0.0, 0.5), 1e-15));
    }

    #[test]
    fn xi_residual_examples() {
        let r = cr_residual_xi(&PseudoVectorState::new(1.0, 0.0, 0.0), &ctx()).unwrap();
        assert_abs_diff_eq!(r.d1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.d2, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.d3, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.d4, 0.0, epsilon = 1e-15);

        let a = Vec3::new(3.0, 0.0, 4.0);
        let r = cr_residual_xi(&PseudoVectorState(a), &ctx()).unwrap();
        let expected = fd_residual(fd(xi_field, &a, [1.0, 0.0], &ctx()), fd(xi_field, &a, [0.0, 1.0], &ctx()));
        for (got, want) in r.to_array().iter().zip(expected) {
            assert!((got - want).abs() < 1e-6, "{r:?} {expected:?}");
        }
        assert!(cr_residual_xi(&PseudoVectorState::new(0.0, 0.0, 2.0), &ctx()).is_err());
    }

    #[test]
    fn eta_residual_examples() {
        let plus = HalfSpaceSign::Plus;
        let r = cr_residual_eta(&Vec3::new(1.0, 0.0, 0.0), plus, &ctx()).unwrap();
        assert_eq!(r.max_abs(), 0.0);

        let b = Vec3::new(3.0, 0.0, 4.0);
        let r = cr_residual_eta(&b, plus, &ctx()).unwrap();
        let expected = fd_residual(fd(eta_from_proper, &b, [1.0, 0.0], &ctx()), fd(eta_from_proper, &b, [0.0, 1.0], &ctx()));
        for (got, want) in r.to_array().iter().zip(expected) {
            assert!((got - want).abs() < 1e-6, "{r:?} {expected:?}");
        }
        assert!(cr_residual_eta(&b, HalfSpaceSign::Minus, &ctx()).is_err());
        assert!(cr_residual_eta(&Vec3::new(0.0, 0.0, 1.0), plus, &ctx()).is_err());
    }

    #[test]
    fn residuals_decay_like_inverse_square_root_at_infinity() {
        let dir = Vec3::new(0.6, 0.0, 0.8);
        let at = |rho: f64| {
            let x = dir * (rho / 0.6);
            let xi = cr_residual_xi(&PseudoVectorState(x), &ctx()).unwrap().max_abs();
            let eta = cr_residual_eta(&x, HalfSpaceSign::Plus, &ctx()).unwrap().max_abs();
            (xi, eta)
        };
        let (xi1, eta1) = at(1e6);
        let (xi4, eta4) = at(4e6);
        assert!(xi1 < 2e-3 && eta1 < 2e-3);
        assert_abs_diff_eq!(xi4 / xi1, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(eta4 / eta1, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn axis_example() {
        let anchor = Vec3::new(0.0, 0.0, 0.5);
        let n = Direction2::new(1.0, 0.0).unwrap();
        let m = ApproachDirection::new(0.0, 1.0).unwrap();
        let k = singular_dir_deriv(SingularSet::Axis, &anchor, FieldModel::Pseudo, n, m, &ctx()).unwrap();
        assert!(close(k.kminus[0], I * 0.5 * phase(-FRAC_PI_4), 1e-15));
        assert!(k.diverges(0) && !k.diverges(1));
        assert_ne!(k.kzero[1], ZERO);
        // numerical limit
        let lift = ctx().lifted(m.mu());
        for eps in [1e-4, 1e-5] {
            let d = dir_deriv_xi(&PseudoVectorState(anchor + Vec3::new(0.0, eps, 0.0)), n, &lift).unwrap();
            assert!(close(d.d1 * eps, k.kminus[0], 2.0 * eps));
        }
    }

    #[test]
    fn cut_example_and_antisymmetry() {
        let anchor = Vec3::new(1.0, 0.0, 0.0);
        for theta in [0.0, 0.7, 2.0, -1.1] {
            let n = Direction2::from_angle(theta);
            let up = ApproachDirection::from_angle(FRAC_PI_2);
            let down = ApproachDirection::from_angle(-FRAC_PI_2);
            for model in [FieldModel::Pseudo, FieldModel::Proper] {
                let kp = singular_dir_deriv(SingularSet::Cut, &anchor, model, n, up, &ctx()).unwrap();
                let km = singular_dir_deriv(SingularSet::Cut, &anchor, model, n, down, &ctx()).unwrap();
                for k in 0..2 {
                    assert!(close(kp.kzero[k], -km.kzero[k], 1e-15));
                }
                if model == FieldModel::Pseudo {
                    assert!(close(kp.kzero[0], c(0.5 * n.n1(), -0.5 * n.n2()), 1e-15));
                }
                // the vector-model field on each side
                for (m, k) in [(up, kp), (down, km)] {
                    let eps = 1e-7;
                    let x = anchor + Vec3::new(m.m1() * eps, m.m2() * eps, 0.0);
                    let d = match model {
                        FieldModel::Pseudo => dir_deriv_xi(&PseudoVectorState(x), n, &ctx()).unwrap(),
                        FieldModel::Proper => dir_deriv_eta(&x, n, &ctx()).unwrap(),
                    };
                    assert!(close(d.d1, k.kzero[0], 1e-6) && close(d.d2, k.kzero[1], 1e-6));
                }
            }
        }
        let along = ApproachDirection::new(1.0, 0.0).unwrap();
        let n = Direction2::new(1.0, 0.0).unwrap();
        assert!(singular_dir_deriv(SingularSet::Cut, &anchor, FieldModel::Pseudo, n, along, &ctx()).is_err());
        let axis = Vec3::new(0.0, 0.0, 1.0);
        assert!(singular_dir_deriv(SingularSet::Axis, &axis, FieldModel::Pseudo, n, along, &ctx()).is_err());
    }

    #[test]
    fn plane_origin_eta_first_component_vanishes() {
        for mu in [0.3, 2.0, -2.5] {
            let k = singular_dir_deriv(
                SingularSet::PlaneOrigin,
                &Vec3::zeros(),
                FieldModel::Proper,
                Direction2::from_angle(1.0),
                ApproachDirection::from_angle(mu),
                &ctx(),
            )
            .unwrap();
            assert_eq!((k.kminus[0], k.kzero[0], k.kplus[0]), (ZERO, ZERO, ZERO));
        }
    }

    #[test]
    fn region_mapping() {
        assert_eq!(SingularSet::from_region(RegionTag::AxisMinus).unwrap(), SingularSet::Axis);
        assert_eq!(SingularSet::from_region(RegionTag::Cut).unwrap(), SingularSet::Cut);
        assert!(SingularSet::from_region(RegionTag::InteriorPlus).is_err());
    }

    #[test]
    fn chart_examples() {
        let p = ChartPoint::new(ChartId::CylindricalParabolic, 1.0, 1.0, 0.0, DomainVariant::VectorG).unwrap();
        let d = chart_dir_deriv(&p, FieldModel::Pseudo, Direction2::new(1.0, 0.0).unwrap(), &ctx()).unwrap();
        assert!(close(d.d1, c(SQRT_2 / 2.0, 0.0), 1e-15));
        let xi = xi_in_chart(&p, &ctx());
        let d = chart_dir_deriv(&p, FieldModel::Pseudo, Direction2::new(1.0, 1.0).unwrap(), &ctx()).unwrap();
        assert_abs_diff_eq!((d.d1 / xi.c1).im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((d.d2 / xi.c2).im, 0.0, epsilon = 1e-15);
        let origin = ChartPoint::new(ChartId::CylindricalParabolic, 0.0, 0.0, 1.0, DomainVariant::VectorG).unwrap();
        assert!(matches!(
            chart_dir_deriv(&origin, FieldModel::Pseudo, Direction2::from_angle(0.0), &ctx()),
            Err(Error::SingularPoint(_))
        ));
        let other = ChartPoint::new(ChartId::Parabolic, 1.0, 1.0, 1.0, DomainVariant::VectorG).unwrap();
        assert!(matches!(
            chart_dir_deriv(&other, FieldModel::Pseudo, Direction2::from_angle(0.0), &ctx()),
            Err(Error::Validation(_))
        ));
    }

    fn safe_point() -> impl Strategy<Value = Vec3> {
        (0.2..3.0f64, -3.2..3.2f64, -3.0..3.0f64).prop_map(|(rho, g, z)| Vec3::new(rho * g.cos(), rho * g.sin(), z))
    }

    fn relative_close(a: &DirectionalDerivative, b: &DirectionalDerivative, scale: f64) -> bool {
        a.max_abs_diff(b) <= 1e-6 * (1.0 + scale)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn xi_matches_finite_differences(x in safe_point(), theta in -3.2..3.2f64) {
            let n = Direction2::from_angle(theta);
            let ctx = ctx().lifted(ctx().gamma_at(&x));
            let d = dir_deriv_xi(&PseudoVectorState(x), n, &ctx).unwrap();
            let f = fd(xi_field, &x, n.as_array(), &ctx);
            prop_assert!(relative_close(&d, &f, d.d1.norm().max(d.d2.norm())), "{d:?} {f:?}");
        }

        #[test]
        fn eta_matches_finite_differences(x in safe_point(), theta in -3.2..3.2f64) {
            let n = Direction2::from_angle(theta);
            let ctx = ctx().lifted(ctx().gamma_at(&x));
            let d = dir_deriv_eta(&x, n, &ctx).unwrap();
            let f = fd(eta_from_proper, &x, n.as_array(), &ctx);
            prop_assert!(relative_close(&d, &f, d.d1.norm().max(d.d2.norm())), "{d:?} {f:?}");
        }

        #[test]
        fn residuals_match_finite_differences(x in safe_point()) {
            let ctx = ctx().lifted(ctx().gamma_at(&x));
            let r = cr_residual_xi(&PseudoVectorState(x), &ctx).unwrap().to_array();
            let e = fd_residual(fd(xi_field, &x, [1.0, 0.0], &ctx), fd(xi_field, &x, [0.0, 1.0], &ctx));
            for (g, w) in r.iter().zip(e) {
                prop_assert!((g - w).abs() < 1e-6 * (1.0 + w.abs()));
            }
            let r = cr_residual_eta(&x, HalfSpaceSign::of(x.z), &ctx).unwrap().to_array();
            let e = fd_residual(fd(eta_from_proper, &x, [1.0, 0.0], &ctx), fd(eta_from_proper, &x, [0.0, 1.0], &ctx));
            for (g, w) in r.iter().zip(e) {
                prop_assert!((g - w).abs() < 1e-6 * (1.0 + w.abs()));
            }
        }

        #[test]
        fn plane_residuals_vanish(rho in 0.1..5.0f64, g in -3.2..3.2f64) {
            let x = Vec3::new(rho * g.cos(), rho * g.sin(), 0.0);
            let r = cr_residual_eta(&x, HalfSpaceSign::Plus, &ctx()).unwrap();
            prop_assert!(r.max_abs() < 1e-10);
            let r = cr_residual_xi(&PseudoVectorState(x), &ctx()).unwrap();
            prop_assert!(r.d3.abs() < 1e-10 && r.d4.abs() < 1e-10);
        }

        #[test]
        fn split_is_additive(x in safe_point(), theta in -3.2..3.2f64) {
            let n = Direction2::from_angle(theta);
            let (par, perp) = split_direction(n, &x).unwrap();
            let (_, cross) = planar_dot_cross(par, &x);
            let (dot, _) = planar_dot_cross(perp, &x);
            prop_assert!(cross.abs() < 1e-12 * (1.0 + x.norm()) && dot.abs() < 1e-12 * (1.0 + x.norm()));
            let v = PseudoVectorState(x);
            for model in [FieldModel::Pseudo, FieldModel::Proper] {
                let get = |w| match model {
                    FieldModel::Pseudo => planar_deriv_xi(&v, w, &ctx()).unwrap(),
                    FieldModel::Proper => planar_deriv_eta(&x, w, &ctx()).unwrap(),
                };
                let (full, a, b) = (get(n.as_array()), get(par), get(perp));
                let sum = DirectionalDerivative { d1: a.d1 + b.d1, d2: a.d2 + b.d2 };
                prop_assert!(full.max_abs_diff(&sum) < 1e-12 * (1.0 + full.d1.norm() + full.d2.norm()));
            }
        }

        #[test]
        fn connection_matrix_reproduces_derivative(x in safe_point(), theta in -3.2..3.2f64) {
            let n = Direction2::from_angle(theta);
            let v = PseudoVectorState(x);
            let a = connection_matrix(&v, n, &ctx()).unwrap();
            let xi = xi_from_pseudo(&v, &ctx());
            let d = dir_deriv_xi(&v, n, &ctx()).unwrap();
            let prod = a * nalgebra::Vector2::new(xi.c1, xi.c2);
            prop_assert!(close(prod[0], d.d1, 1e-12 * (1.0 + d.d1.norm())));
            prop_assert!(close(prod[1], d.d2, 1e-12 * (1.0 + d.d2.norm())));
            // branch independence
            let other = connection_matrix(&v, n, &ctx().lifted(ctx().gamma_at(&x) + 2.0 * std::f64::consts::TAU)).unwrap();
            prop_assert_eq!(a, other);
            let a_eta = connection_matrix_eta(&x, n, &ctx()).unwrap();
            let eta = eta_from_proper(&x, &ctx());
            let d = dir_deriv_eta(&x, n, &ctx()).unwrap();
            prop_assert!(close(a_eta[(1, 1)] * eta.c2, d.d2, 1e-12 * (1.0 + d.d2.norm())));
        }

        #[test]
        fn axis_expansion_matches_exact(
            s in 0.5..2.0f64,
            below in any::<bool>(),
            theta in -3.2..3.2f64,
            mu in 0.05..3.1f64,
            flip in any::<bool>(),
        ) {
            let mu = if flip { -mu } else { mu };
            let anchor = Vec3::new(0.0, 0.0, if below { -s } else { s });
            let n = Direction2::from_angle(theta);
            let m = ApproachDirection::from_angle(mu);
            let lift = ctx().lifted(mu);
            for model in [FieldModel::Pseudo, FieldModel::Proper] {
                let k = singular_dir_deriv(SingularSet::Axis, &anchor, model, n, m, &ctx()).unwrap();
                let eps = 1e-3;
                let x = anchor + Vec3::new(m.m1() * eps, m.m2() * eps, 0.0);
                let exact = match model {
                    FieldModel::Pseudo => dir_deriv_xi(&PseudoVectorState(x), n, &lift).unwrap(),
                    FieldModel::Proper => dir_deriv_eta(&x, n, &lift).unwrap(),
                };
                prop_assert!(exact.max_abs_diff(&k.eval(eps)) < 50.0 * eps * eps, "{model:?} {exact:?} {k:?}");
                let diverging = if below && model == FieldModel::Pseudo { 1 } else { 0 };
                let (_, cross) = planar_dot_cross(n.as_array(), &Vec3::new(m.m1(), m.m2(), 0.0));
                if cross.abs() > 1e-3 {
                    prop_assert!(k.diverges(diverging));
                }
                if model == FieldModel::Pseudo {
                    prop_assert!(!k.diverges(1 - diverging));
                }
            }
        }

        #[test]
        fn plane_origin_expansion_matches_exact(theta in -3.2..3.2f64, mu in 0.05..3.1f64, flip in any::<bool>()) {
            let mu = if flip { -mu } else { mu };
            let n = Direction2::from_angle(theta);
            let m = ApproachDirection::from_angle(mu);
            let lift = ctx().lifted(mu);
            for model in [FieldModel::Pseudo, FieldModel::Proper] {
                let k = singular_dir_deriv(SingularSet::PlaneOrigin, &Vec3::zeros(), model, n, m, &ctx()).unwrap();
                for eps in [1e-2, 1e-4] {
                    let x = Vec3::new(m.m1() * eps, m.m2() * eps, 0.0);
                    let exact = match model {
                        FieldModel::Pseudo => dir_deriv_xi(&PseudoVectorState(x), n, &lift).unwrap(),
                        FieldModel::Proper => dir_deriv_eta(&x, n, &lift).unwrap(),
                    };
                    let scale = eps.powf(-0.5);
                    prop_assert!(exact.max_abs_diff(&k.eval(eps)) < 1e-12 * scale, "{exact:?} {:?}", k.eval(eps));
                }
            }
        }

        #[test]
        fn infinite_boundary_expansion_matches_exact(
            z in -2.0..2.0f64,
            theta in -3.2..3.2f64,
            mu in 0.05..3.1f64,
            flip in any::<bool>(),
        ) {
            let mu = if flip { -mu } else { mu };
            let n = Direction2::from_angle(theta);
            let m = ApproachDirection::from_angle(mu);
            let lift = ctx().lifted(mu);
            let anchor = Vec3::new(0.0, 0.0, z);
            for model in [FieldModel::Pseudo, FieldModel::Proper] {
                let k = singular_dir_deriv(SingularSet::InfiniteBoundary, &anchor, model, n, m, &ctx()).unwrap();
                let eps = 1e-3;
                let x = Vec3::new(m.m1() / eps, m.m2() / eps, z);
                let exact = match model {
                    FieldModel::Pseudo => dir_deriv_xi(&PseudoVectorState(x), n, &lift).unwrap(),
                    FieldModel::Proper => dir_deriv_eta(&x, n, &lift).unwrap(),
                };
                prop_assert!(exact.max_abs_diff(&k.eval(eps)) < 5.0 * eps.powf(2.5), "{model:?} {exact:?} {:?}", k.eval(eps));
            }
        }

        #[test]
        fn chart_derivative_matches_finite_differences(
            y1 in -2.0..2.0f64,
            y2 in 0.1..2.0f64,
            y3 in -2.0..2.0f64,
            theta in -3.2..3.2f64,
        ) {
            let nu = Direction2::from_angle(theta);
            let p = ChartPoint::new(ChartId::CylindricalParabolic, y1, y2, y3, DomainVariant::ExtendedG).unwrap();
            let h = 1e-6 * (1.0 + y1.hypot(y2).hypot(y3));
            let at = |t: f64| ChartPoint::new(ChartId::CylindricalParabolic, y1 + t * nu.n1(), y2 + t * nu.n2(), y3, DomainVariant::ExtendedG).unwrap();
            for model in [FieldModel::Pseudo, FieldModel::Proper] {
                let field = |q: &ChartPoint| match model {
                    FieldModel::Pseudo => xi_in_chart(q, &ctx()),
                    FieldModel::Proper => eta_in_chart(q, &ctx()),
                };
                let diff = (field(&at(h)) - field(&at(-h))) * (0.5 / h);
                let d = chart_dir_deriv(&p, model, nu, &ctx()).unwrap();
                let f = DirectionalDerivative { d1: diff.c1, d2: diff.c2 };
                prop_assert!(relative_close(&d, &f, d.d1.norm().max(d.d2.norm())), "{model:?} {d:?} {f:?}");
            }
        }
    }
}
