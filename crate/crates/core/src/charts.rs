//! Curvilinear charts of the doubled space.
//!
//! Three charts are supported, each with a vector-space parameter domain `G`
//! and a doubled domain `G̃` that covers every Cartesian point twice:
//!
//! | chart                 | map                                                     | `G`            | `G̃`              |
//! |-----------------------|---------------------------------------------------------|----------------|------------------|
//! | cylindrical parabolic | `((y₁² − y₂²)/2, y₁y₂, y₃)`                              | `y₂ ≥ 0`       | `y₂ ∈ ℝ`         |
//! | parabolic             | `(y₁y₂ cos y₃, y₁y₂ sin y₃, (y₁² − y₂²)/2)`              | `y₃ ∈ [0, 2π)` | `y₃ ∈ [0, 4π)`   |
//! | spherical             | `(r sin θ cos φ, r sin θ sin φ, r cos θ)`                | `φ ∈ [0, 2π)`  | `φ ∈ [−2π, 2π)`  |
//!
//! The spherical chart has two further doubled domains that trade half of the
//! angular range for negative radii: `G̃′` with `φ ∈ [−π, π)` and `G̃″` with
//! `φ ∈ [0, 2π)`, both with `r ∈ ℝ`. A point with `r < 0` stands for the
//! `G̃` point `(|r|, θ, φ ± π)` (or `φ − 3π`), chosen so that the spinor value
//! is preserved.
//!
//! Sheet conventions: cylindrical parabolic points are on the first sheet iff
//! `y₂ > 0` or `y₂ = 0, y₁ ≥ 0`; parabolic iff `y₃ ∈ [0, 2π)`; spherical iff
//! the `G̃` representative has `φ ∈ [0, 2π)`. With these, the chart fields
//! agree with the principal Cartesian fields on the first sheet and are their
//! negatives on the second.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::proper_model::HalfSpaceSign;
use crate::pseudo_model::{split_moduli, BranchContext, Sheet};
use crate::{Error, Result, Spinor, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartId {
    CylindricalParabolic,
    Parabolic,
    Spherical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainVariant {
    VectorG,
    ExtendedG,
    SphericalGPrime,
    SphericalGDoublePrime,
}

/// Coordinates `(y₁, y₂, y₃)` in a chart and domain variant. For the
/// spherical chart these are `(r, θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    chart: ChartId,
    y: [f64; 3],
    variant: DomainVariant,
}

fn in_range(value: f64, lo: f64, hi: f64) -> bool {
    value >= lo && value < hi
}

impl ChartPoint {
    pub fn new(chart: ChartId, y1: f64, y2: f64, y3: f64, variant: DomainVariant) -> Result<Self> {
        let p = Self {
            chart,
            y: [y1, y2, y3],
            variant,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let [y1, y2, y3] = self.y;
        if !(y1.is_finite() && y2.is_finite() && y3.is_finite()) {
            return Err(Error::Validation("chart coordinates must be finite".into()));
        }
        let fail = |what: &str| {
            Err(Error::Validation(format!(
                "{what} out of range for {:?} in {:?}",
                self.chart, self.variant
            )))
        };
        use DomainVariant::*;
        match self.chart {
            ChartId::CylindricalParabolic => match self.variant {
                VectorG if y2 < 0.0 => return fail("y2"),
                VectorG | ExtendedG => {}
                _ => return fail("domain variant"),
            },
            ChartId::Parabolic => {
                if y1 < 0.0 || y2 < 0.0 {
                    return fail("y1/y2");
                }
                let upper = match self.variant {
                    VectorG => TAU,
                    ExtendedG => 2.0 * TAU,
                    _ => return fail("domain variant"),
                };
                if !in_range(y3, 0.0, upper) {
                    return fail("y3");
                }
            }
            ChartId::Spherical => {
                if !(0.0..=PI).contains(&y2) {
                    return fail("theta");
                }
                let (radius_ok, phi_ok) = match self.variant {
                    VectorG => (y1 >= 0.0, in_range(y3, 0.0, TAU)),
                    ExtendedG => (y1 >= 0.0, in_range(y3, -TAU, TAU)),
                    SphericalGPrime => (true, in_range(y3, -PI, PI)),
                    SphericalGDoublePrime => (true, in_range(y3, 0.0, TAU)),
                };
                if !radius_ok {
                    return fail("r");
                }
                if !phi_ok {
                    return fail("phi");
                }
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn variant(&self) -> DomainVariant {
        self.variant
    }

    pub fn coords(&self) -> [f64; 3] {
        self.y
    }

    /// Representative in `G̃` for spherical `G̃′`/`G̃″` points; identity
    /// otherwise.
    fn extended_representative(&self) -> ChartPoint {
        if self.chart != ChartId::Spherical {
            return *self;
        }
        let [r, theta, phi] = self.y;
        let phi = match self.variant {
            DomainVariant::VectorG | DomainVariant::ExtendedG => return *self,
            _ if r >= 0.0 => phi,
            DomainVariant::SphericalGPrime => {
                if phi >= 0.0 {
                    phi + PI
                } else {
                    phi - PI
                }
            }
            DomainVariant::SphericalGDoublePrime => {
                if phi < PI {
                    phi - PI
                } else {
                    phi - 3.0 * PI
                }
            }
        };
        ChartPoint {
            chart: ChartId::Spherical,
            y: [r.abs(), theta, phi],
            variant: DomainVariant::ExtendedG,
        }
    }
}

/// Cartesian image of a chart point. Both covers of a chart share the
/// chart's defining formulas.
pub fn to_cartesian(p: &ChartPoint) -> Vec3 {
    let [y1, y2, y3] = p.extended_representative().y;
    match p.chart {
        ChartId::CylindricalParabolic => Vec3::new(0.5 * (y1 * y1 - y2 * y2), y1 * y2, y3),
        ChartId::Parabolic => {
            let planar = y1 * y2;
            Vec3::new(planar * y3.cos(), planar * y3.sin(), 0.5 * (y1 * y1 - y2 * y2))
        }
        ChartId::Spherical => {
            let (sin_t, cos_t) = y2.sin_cos();
            let (sin_p, cos_p) = y3.sin_cos();
            Vec3::new(y1 * sin_t * cos_p, y1 * sin_t * sin_p, y1 * cos_t)
        }
    }
}

/// Metric tensor `g_ij` in `(y₁, y₂, y₃)` order.
pub fn metric(p: &ChartPoint) -> Matrix3<f64> {
    let [y1, y2, _] = p.y;
    let diag = match p.chart {
        ChartId::CylindricalParabolic => {
            let s = y1 * y1 + y2 * y2;
            Vec3::new(s, s, 1.0)
        }
        ChartId::Parabolic => {
            let s = y1 * y1 + y2 * y2;
            Vec3::new(s, s, y1 * y1 * y2 * y2)
        }
        ChartId::Spherical => {
            let r_sqr = y1 * y1;
            let sin_t = y2.sin();
            Vec3::new(1.0, r_sqr, r_sqr * sin_t * sin_t)
        }
    };
    Matrix3::from_diagonal(&diag)
}

/// `e^{iγ/2}` carried by the chart, or `None` where the chart coordinates
/// leave it undetermined (cylindrical parabolic origin of the `y`-plane).
fn half_angle_factor(p: &ChartPoint) -> Option<Complex64> {
    let rep = p.extended_representative();
    let [y1, y2, y3] = rep.y;
    match p.chart {
        ChartId::CylindricalParabolic => {
            let norm = y1.hypot(y2);
            (norm > 0.0).then(|| Complex64::new(y1 / norm, y2 / norm))
        }
        ChartId::Parabolic | ChartId::Spherical => Some(Complex64::from_polar(1.0, 0.5 * y3)),
    }
}

fn resolved_half_angle(p: &ChartPoint, ctx: &BranchContext) -> Complex64 {
    half_angle_factor(p).unwrap_or_else(|| Complex64::from_polar(1.0, 0.5 * ctx.mute_angle))
}

/// `ξ` written in chart coordinates.
pub fn xi_in_chart(p: &ChartPoint, ctx: &BranchContext) -> Spinor {
    let u = resolved_half_angle(p, ctx);
    let [y1, y2, y3] = p.extended_representative().y;
    match p.chart {
        ChartId::CylindricalParabolic => {
            let rho = 0.5 * (y1 * y1 + y2 * y2);
            let (plus, minus) = split_moduli(rho * rho, y3);
            Spinor::new(u.conj() * plus.sqrt(), u * minus.sqrt())
        }
        ChartId::Parabolic => Spinor::new(u.conj() * y1, u * y2),
        ChartId::Spherical => {
            let scale = (2.0 * y1).sqrt();
            let (sin_h, cos_h) = (0.5 * y2).sin_cos();
            Spinor::new(u.conj() * (scale * cos_h), u * (scale * sin_h))
        }
    }
}

/// `η` written in chart coordinates; `σ` is the sign of the Cartesian `x₃`.
pub fn eta_in_chart(p: &ChartPoint, ctx: &BranchContext) -> Spinor {
    let u = resolved_half_angle(p, ctx);
    let [y1, y2, y3] = p.extended_representative().y;
    match p.chart {
        ChartId::CylindricalParabolic => {
            let rho = 0.5 * (y1 * y1 + y2 * y2);
            let b = rho.hypot(y3);
            let plus = b + rho;
            let minus = if plus > 0.0 { y3 * y3 / plus } else { 0.0 };
            let sigma = HalfSpaceSign::of(y3).value();
            Spinor::new(u.conj() * (sigma * minus.sqrt()), u * plus.sqrt())
        }
        ChartId::Parabolic => Spinor::new(
            u.conj() * ((y1 - y2) * FRAC_1_SQRT_2),
            u * ((y1 + y2) * FRAC_1_SQRT_2),
        ),
        ChartId::Spherical => {
            let root = y1.sqrt();
            let (sin_h, cos_h) = (0.5 * y2).sin_cos();
            Spinor::new(u.conj() * (root * (cos_h - sin_h)), u * (root * (cos_h + sin_h)))
        }
    }
}

/// The other preimage of the same Cartesian point in a doubled domain.
pub fn antipode(p: &ChartPoint) -> Result<ChartPoint> {
    if p.variant == DomainVariant::VectorG {
        return Err(Error::Validation(
            "the vector domain has no second sheet".into(),
        ));
    }
    let [y1, y2, y3] = p.y;
    match p.chart {
        ChartId::CylindricalParabolic => ChartPoint::new(p.chart, -y1, -y2, y3, p.variant),
        ChartId::Parabolic => ChartPoint::new(p.chart, y1, y2, (y3 + TAU).rem_euclid(2.0 * TAU), p.variant),
        ChartId::Spherical => {
            let rep = p.extended_representative();
            let [r, theta, phi] = rep.y;
            let shifted = if phi < 0.0 { phi + TAU } else { phi - TAU };
            let flipped = ChartPoint::new(ChartId::Spherical, r, theta, shifted, DomainVariant::ExtendedG)?;
            convert_spherical_domain(&flipped, p.variant)
        }
    }
}

pub fn sheet_of(p: &ChartPoint) -> Sheet {
    let [y1, y2, y3] = p.extended_representative().y;
    let first = match p.chart {
        ChartId::CylindricalParabolic => y2 > 0.0 || (y2 == 0.0 && y1 >= 0.0),
        ChartId::Parabolic => y3 < TAU,
        ChartId::Spherical => y3 >= 0.0,
    };
    if first {
        Sheet::First
    } else {
        Sheet::Second
    }
}

/// Re-express a spherical point in another domain variant without changing
/// its spinor value.
///
/// Converting into the vector domain only succeeds for points whose value
/// the vector domain can represent (first sheet).
pub fn convert_spherical_domain(p: &ChartPoint, target: DomainVariant) -> Result<ChartPoint> {
    if p.chart != ChartId::Spherical {
        return Err(Error::Validation(
            "domain conversion is defined for the spherical chart only".into(),
        ));
    }
    let rep = p.extended_representative();
    let [r, theta, phi] = rep.y;
    let (r_out, phi_out) = match target {
        DomainVariant::ExtendedG => (r, phi),
        DomainVariant::VectorG => {
            if phi < 0.0 {
                return Err(Error::Validation(
                    "point lies on the second sheet; the vector domain cannot carry its spinor value".into(),
                ));
            }
            (r, phi)
        }
        DomainVariant::SphericalGPrime => {
            if phi >= PI {
                (-r, phi - PI)
            } else if phi < -PI {
                (-r, phi + PI)
            } else {
                (r, phi)
            }
        }
        DomainVariant::SphericalGDoublePrime => {
            if phi >= 0.0 {
                (r, phi)
            } else if phi >= -PI {
                (-r, phi + PI)
            } else {
                (-r, phi + 3.0 * PI)
            }
        }
    };
    ChartPoint::new(ChartId::Spherical, r_out, theta, phi_out, target)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    /// A full tour of nearby directions closes after `2π`.
    TwoPi,
    /// Axis points of the doubled space: directions close after `4π`.
    FourPi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionNeighborhood {
    pub multiplicity: Multiplicity,
    /// `Δ(y) = atan2(y₂, y₁)`: rotation between the chart direction `φ` and
    /// the Cartesian direction at an ordinary cylindrical parabolic point.
    /// `None` on the axis and for the other charts.
    pub delta_shift: Option<f64>,
}

pub fn direction_multiplicity(p: &ChartPoint, ctx: &BranchContext) -> DirectionNeighborhood {
    let x = to_cartesian(p);
    if ctx.is_on_axis(&x) {
        return DirectionNeighborhood {
            multiplicity: Multiplicity::FourPi,
            delta_shift: None,
        };
    }
    let delta_shift = match p.chart {
        ChartId::CylindricalParabolic => Some(p.y[1].atan2(p.y[0])),
        _ => None,
    };
    DirectionNeighborhood {
        multiplicity: Multiplicity::TwoPi,
        delta_shift,
    }
}
