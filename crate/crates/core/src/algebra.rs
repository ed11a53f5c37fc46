//! The extended unitary group `SU(2) ⊕ J` and its action on spinors and
//! vectors.
//!
//! A group element is a unit quaternion `(n0, n)`. Its spinor matrix is
//! `B(n) = n0·I − i σʲ nⱼ` and its vector matrix is
//! `O(n) = I + 2[n0·N + N²]` with `N v = n × v`, i.e. `N_ij = −ε_ijk n_k`.
//! The sign of `N` is fixed so that the hermitian square of `B(n)ξ` is the
//! hermitian square of `ξ` rotated by `O(n)`; `O(n)` is then the right-handed
//! rotation by `2·acos(n0)` about `n`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;

use crate::{Error, Result, Vec3};

/// Allowed deviation of `n0² + |n|²` from one when building an element.
pub const UNIT_TOLERANCE: f64 = 1e-10;

/// Drift above which a composed element is renormalized.
const RENORMALIZE_DRIFT: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Two-component complex spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor {
        c1: Complex64::new(0.0, 0.0),
        c2: Complex64::new(0.0, 0.0),
    };

    pub fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c1, c2 }
    }

    /// Spinor with real components.
    pub fn real(c1: f64, c2: f64) -> Self {
        Self::new(Complex64::new(c1, 0.0), Complex64::new(c2, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.c1.conj(), self.c2.conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.c1 * factor, self.c2 * factor)
    }

    pub fn is_finite(&self) -> bool {
        self.c1.is_finite() && self.c2.is_finite()
    }

    /// Largest componentwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Spinor) -> f64 {
        (self.c1 - other.c1).norm().max((self.c2 - other.c2).norm())
    }

    /// `[re1, im1, re2, im2]`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.c1.re, self.c1.im, self.c2.re, self.c2.im]
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.c1 + rhs.c1, self.c2 + rhs.c2)
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.c1 - rhs.c1, self.c2 - rhs.c2)
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.c1, -self.c2)
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: f64) -> Spinor {
        Spinor::new(self.c1 * rhs, self.c2 * rhs)
    }
}

impl Mul<Complex64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: Complex64) -> Spinor {
        self.scale(rhs)
    }
}

/// Whether a group element contains the reflection `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Proper,
    Reflected,
}

impl Parity {
    pub fn compose(self, other: Parity) -> Parity {
        if self == other {
            Parity::Proper
        } else {
            Parity::Reflected
        }
    }
}

/// The two inequivalent spinor representations of the extended group; they
/// differ only in the sign with which `J = diag(i, i)` acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinorType {
    T1,
    T2,
}

/// Element of the extended unitary group: a unit quaternion and a parity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub n0: f64,
    pub nvec: Vec3,
    pub parity: Parity,
}

impl GroupElement {
    pub fn new(n0: f64, nvec: Vec3, parity: Parity) -> Result<Self> {
        let g = Self { n0, nvec, parity };
        g.validate()?;
        Ok(g)
    }

    pub fn identity() -> Self {
        Self {
            n0: 1.0,
            nvec: Vec3::zeros(),
            parity: Parity::Proper,
        }
    }

    /// Rotation by `angle` (right-handed) about `axis`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self> {
        let len = axis.norm();
        if !(len > 0.0) || !angle.is_finite() {
            return Err(Error::Validation(
                "axis must be a finite nonzero vector".into(),
            ));
        }
        let half = 0.5 * angle;
        Ok(Self {
            n0: half.cos(),
            nvec: axis * (half.sin() / len),
            parity: Parity::Proper,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let drift = self.norm_sqr() - 1.0;
        if !drift.is_finite() || drift.abs() > UNIT_TOLERANCE {
            return Err(Error::Validation(format!(
                "group element violates n0² + |n|² = 1 (drift {drift:e})"
            )));
        }
        Ok(())
    }

    fn norm_sqr(&self) -> f64 {
        self.n0 * self.n0 + self.nvec.norm_squared()
    }

    /// `−g`: same rotation, opposite spinor matrix.
    pub fn negated(&self) -> Self {
        Self {
            n0: -self.n0,
            nvec: -self.nvec,
            parity: self.parity,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            n0: self.n0,
            nvec: -self.nvec,
            parity: self.parity,
        }
    }
}

/// 3×3 rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3(pub Matrix3<f64>);

impl Rotation3 {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }
}

/// `B(n) = n0·I − i σʲ nⱼ`.
pub fn su2_matrix(g: &GroupElement) -> Result<Matrix2<Complex64>> {
    g.validate()?;
    Ok(su2_unchecked(g))
}

fn su2_unchecked(g: &GroupElement) -> Matrix2<Complex64> {
    let (n1, n2, n3) = (g.nvec.x, g.nvec.y, g.nvec.z);
    Matrix2::new(
        Complex64::new(g.n0, -n3),
        Complex64::new(-n2, -n1),
        Complex64::new(n2, -n1),
        Complex64::new(g.n0, n3),
    )
}

/// `O(n) = I + 2[n0·N + N²]` with `N v = n × v`.
pub fn so3_matrix(g: &GroupElement) -> Result<Rotation3> {
    g.validate()?;
    Ok(so3_unchecked(g))
}

fn so3_unchecked(g: &GroupElement) -> Rotation3 {
    let cross = g.nvec.cross_matrix();
    Rotation3(Matrix3::identity() + (cross * g.n0 + cross * cross) * 2.0)
}

/// Quaternion product; parity flags multiply.
pub fn compose(g: &GroupElement, h: &GroupElement) -> GroupElement {
    let n0 = g.n0 * h.n0 - g.nvec.dot(&h.nvec);
    let nvec = h.nvec * g.n0 + g.nvec * h.n0 + g.nvec.cross(&h.nvec);
    let mut out = GroupElement {
        n0,
        nvec,
        parity: g.parity.compose(h.parity),
    };
    let norm_sqr = out.norm_sqr();
    if (norm_sqr - 1.0).abs() > RENORMALIZE_DRIFT {
        let inv = norm_sqr.sqrt().recip();
        out.n0 *= inv;
        out.nvec *= inv;
    }
    out
}

/// `ξ′ = B(n) ξ`.
pub fn act_on_spinor(g: &GroupElement, s: &Spinor) -> Spinor {
    let b = su2_unchecked(g);
    Spinor::new(
        b[(0, 0)] * s.c1 + b[(0, 1)] * s.c2,
        b[(1, 0)] * s.c1 + b[(1, 1)] * s.c2,
    )
}

/// `a′ = O(n) a`.
pub fn act_on_vector(g: &GroupElement, v: &Vec3) -> Vec3 {
    so3_unchecked(g).apply(v)
}

/// Action of `J`: `+i·s` on type 1 spinors, `−i·s` on type 2.
pub fn parity_on_spinor(t: SpinorType, s: &Spinor) -> Spinor {
    match t {
        SpinorType::T1 => s.scale(I),
        SpinorType::T2 => s.scale(-I),
    }
}

/// Full action of an extended-group element on a spinor of type `t`: the
/// unitary part, followed by `J` when the element is reflected.
pub fn act_on_typed_spinor(g: &GroupElement, t: SpinorType, s: &Spinor) -> Spinor {
    let rotated = act_on_spinor(g, s);
    match g.parity {
        Parity::Proper => rotated,
        Parity::Reflected => parity_on_spinor(t, &rotated),
    }
}
