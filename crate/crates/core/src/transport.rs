//! Continuation of the spinor fields along paths that avoid the axis.
//!
//! The planar angle is lifted to a real number by adding, at every step, the
//! principal increment nearest zero. Since the fields depend on `e^{iγ/2}`,
//! a loop that winds `w` times around the axis multiplies the spinor by
//! `(−1)^w`.

use std::f64::consts::{PI, TAU};

use crate::proper_model::eta_with_gamma;
use crate::pseudo_model::xi_with_gamma;
use crate::{BranchContext, Error, FieldModel, Result, Sheet, Spinor, Vec3};

/// Largest planar-angle increment accepted between consecutive points.
pub const MAX_INCREMENT: f64 = PI / 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    points: Vec<Vec3>,
    closed: bool,
}

impl Path {
    pub fn new(points: Vec<Vec3>, closed: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("path has no points".into()));
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::Validation("path points must be finite".into()));
        }
        Ok(Self { points, closed })
    }

    /// `samples` points on the circle of radius `radius` around `center`
    /// at height `z`, starting at angle `start` and turning `turns` times
    /// (negative turns run clockwise). Closed whenever `turns` is a whole
    /// number; the start point is not repeated.
    pub fn circle(center: (f64, f64), radius: f64, z: f64, start: f64, turns: f64, samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Validation("circle needs at least one sample".into()));
        }
        let step = turns * TAU / samples as f64;
        let points = (0..samples)
            .map(|k| {
                let t = start + step * k as f64;
                Vec3::new(center.0 + radius * t.cos(), center.1 + radius * t.sin(), z)
            })
            .collect();
        Self::new(points, turns.fract() == 0.0)
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Points visited in order, with the start repeated at the end of a
    /// closed path.
    fn traversal(&self) -> impl Iterator<Item = &Vec3> {
        let closing = self.closed.then(|| &self.points[0]);
        self.points.iter().chain(closing)
    }

    /// Same loop with a midpoint inserted in every segment.
    pub fn refined(&self) -> Self {
        let visited: Vec<&Vec3> = self.traversal().collect();
        let mut points = Vec::with_capacity(2 * visited.len());
        for pair in visited.windows(2) {
            points.push(*pair[0]);
            points.push((pair[0] + pair[1]) * 0.5);
        }
        if !self.closed {
            points.push(**visited.last().unwrap());
        }
        if points.is_empty() {
            points.push(self.points[0]);
        }
        Self {
            points,
            closed: self.closed,
        }
    }

    /// This path followed by `other`. Both must be closed loops at the
    /// same base point.
    pub fn concat(&self, other: &Path) -> Result<Self> {
        let (a, b) = (self.points[0], other.points[0]);
        let shared = (a - b).norm() <= 1e-12 * (1.0 + a.norm());
        if !(self.closed && other.closed && shared) {
            return Err(Error::Validation(
                "only closed loops with a common base point can be concatenated".into(),
            ));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Self::new(points, true)
    }
}

fn wrapped_increment(from: f64, to: f64) -> f64 {
    // representative of `to − from` in (−π, π]
    let d = (to - from).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

fn require_off_axis(path: &Path, ctx: &BranchContext) -> Result<()> {
    for (k, p) in path.points.iter().enumerate() {
        if ctx.is_on_axis(p) {
            return Err(Error::SingularPath(format!(
                "point {k} {:?} lies inside the axis tube",
                p.as_slice()
            )));
        }
    }
    Ok(())
}

/// Lifted planar angle at every visited point (a closed path revisits its
/// first point at the end). The first value is the angle of the first point
/// under `ctx`.
pub fn continue_gamma(path: &Path, ctx: &BranchContext) -> Result<Vec<f64>> {
    require_off_axis(path, ctx)?;
    let mut visited = path.traversal();
    let first = visited.next().expect("paths are non-empty");
    let mut previous = first.y.atan2(first.x);
    let mut lifted = vec![ctx.planar_angle(first.x, first.y)];
    for (k, p) in visited.enumerate() {
        let angle = p.y.atan2(p.x);
        let step = wrapped_increment(previous, angle);
        if step.abs() >= MAX_INCREMENT {
            return Err(Error::Resolution(format!(
                "planar angle jumps by {step} before point {}; refine the path",
                k + 1
            )));
        }
        lifted.push(lifted[lifted.len() - 1] + step);
        previous = angle;
    }
    Ok(lifted)
}

/// Signed number of turns of the planar projection of a closed path about
/// the axis.
pub fn winding(path: &Path, ctx: &BranchContext) -> Result<i64> {
    if !path.closed {
        return Err(Error::Validation("winding is defined for closed paths".into()));
    }
    require_off_axis(path, ctx)?;
    let angles: Vec<f64> = path.traversal().map(|p| p.y.atan2(p.x)).collect();
    let total: f64 = angles.windows(2).map(|w| wrapped_increment(w[0], w[1])).sum();
    Ok((total / TAU).round() as i64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportResult {
    pub initial: Spinor,
    pub final_spinor: Spinor,
    pub gamma_start: f64,
    pub gamma_end: f64,
    /// `None` for open paths.
    pub winding: Option<i64>,
    /// The lifted angle ended on the other sheet than it started on.
    pub sign_flip: bool,
    /// Sheet of the lifted end angle.
    pub sheet: Sheet,
}

fn field(model: FieldModel, x: &Vec3, gamma: f64) -> Spinor {
    match model {
        FieldModel::Pseudo => xi_with_gamma(x, gamma),
        FieldModel::Proper => eta_with_gamma(x, gamma),
    }
}

pub fn transport_spinor(path: &Path, model: FieldModel, ctx: &BranchContext) -> Result<TransportResult> {
    ctx.validate()?;
    let lifted = continue_gamma(path, ctx)?;
    let gamma_start = lifted[0];
    let mut gamma_end = lifted[lifted.len() - 1];
    let winding = path
        .closed
        .then(|| ((gamma_end - gamma_start) / TAU).round() as i64);
    if let Some(w) = winding {
        // a closed path ends exactly where it began
        gamma_end = gamma_start + TAU * w as f64;
    }
    let start = &path.points[0];
    let end = path.traversal().last().expect("paths are non-empty");
    let initial = field(model, start, gamma_start);
    let final_spinor = field(model, end, gamma_end);
    if !final_spinor.is_finite() {
        return Err(Error::SingularPath("transported spinor is not finite".into()));
    }
    let sheet = Sheet::of_angle(gamma_end);
    Ok(TransportResult {
        initial,
        final_spinor,
        gamma_start,
        gamma_end,
        winding,
        sign_flip: sheet != Sheet::of_angle(gamma_start),
        sheet,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{sheet_of, ChartId, ChartPoint, DomainVariant};
    use crate::GammaMode;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ctx() -> BranchContext {
        BranchContext::default()
    }

    fn at_angle(t: f64) -> Vec3 {
        Vec3::new(t.cos(), t.sin(), 0.0)
    }

    #[test]
    fn lift_examples() {
        let path = Path::new(vec![at_angle(3.0), at_angle(3.3)], false).unwrap();
        let lift = continue_gamma(&path, &ctx()).unwrap();
        assert_abs_diff_eq!(lift[0], 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lift[1], 3.3, epsilon = 1e-14);

        let still = Path::new(vec![Vec3::new(1.0, 2.0, 3.0); 5], false).unwrap();
        let lift = continue_gamma(&still, &ctx()).unwrap();
        assert!(lift.iter().all(|g| *g == lift[0]));

        let circle = Path::circle((0.0, 0.0), 1.0, 0.0, 0.0, 1.0, 8).unwrap();
        let lift = continue_gamma(&circle, &ctx()).unwrap();
        assert_eq!(lift.len(), 9);
        assert_abs_diff_eq!(lift[8], TAU, epsilon = 1e-14);
    }

    #[test]
    fn lift_errors() {
        let coarse = Path::new(vec![at_angle(0.0), at_angle(2.0)], false).unwrap();
        assert!(matches!(continue_gamma(&coarse, &ctx()), Err(Error::Resolution(_))));
        let through = Path::new(vec![at_angle(0.0), Vec3::new(0.0, 0.0, 1.0)], false).unwrap();
        assert!(matches!(continue_gamma(&through, &ctx()), Err(Error::SingularPath(_))));
        assert!(Path::new(vec![], true).is_err());
    }

    #[test]
    fn transport_examples() {
        let once = Path::circle((0.0, 0.0), 1.0, 0.0, 0.0, 1.0, 100).unwrap();
        let r = transport_spinor(&once, FieldModel::Pseudo, &ctx()).unwrap();
        assert!(r.initial.max_abs_diff(&Spinor::real(1.0, 1.0)) < 1e-15);
        assert!(r.final_spinor.max_abs_diff(&Spinor::real(-1.0, -1.0)) < 1e-12);
        assert_eq!(r.winding, Some(1));
        assert!(r.sign_flip);

        let twice = Path::circle((0.0, 0.0), 1.0, 0.0, 0.0, 2.0, 200).unwrap();
        let r = transport_spinor(&twice, FieldModel::Pseudo, &ctx()).unwrap();
        assert!(r.final_spinor.max_abs_diff(&Spinor::real(1.0, 1.0)) < 1e-12);
        assert_eq!(r.winding, Some(2));
        assert!(!r.sign_flip);

        let still = Path::new(vec![Vec3::new(1.0, 0.5, -1.0); 3], true).unwrap();
        let r = transport_spinor(&still, FieldModel::Proper, &ctx()).unwrap();
        assert_eq!(r.final_spinor, r.initial);
        assert_eq!(r.winding, Some(0));

        let open = Path::new(vec![at_angle(0.0), at_angle(0.5)], false).unwrap();
        let r = transport_spinor(&open, FieldModel::Pseudo, &ctx()).unwrap();
        assert_eq!(r.winding, None);
    }

    #[test]
    fn transport_starts_on_the_context_sheet() {
        let c = BranchContext { gamma_mode: GammaMode::PrincipalExtended(Sheet::Second), ..ctx() };
        let once = Path::circle((0.0, 0.0), 1.0, 0.0, 0.0, 1.0, 64).unwrap();
        let r = transport_spinor(&once, FieldModel::Pseudo, &c).unwrap();
        assert!(r.initial.max_abs_diff(&Spinor::real(-1.0, -1.0)) < 1e-15);
        assert_eq!(r.sheet, Sheet::First);
        assert!(r.sign_flip);
    }

    #[test]
    fn winding_examples() {
        let ccw = Path::circle((0.0, 0.0), 1.0, 0.0, 0.0, 1.0, 16).unwrap();
        assert_eq!(winding(&ccw, &ctx()).unwrap(), 1);
        let cw = Path::circle((0.0, 0.0), 1.0, 0.0, 0.0, -1.0, 16).unwrap();
        assert_eq!(winding(&cw, &ctx()).unwrap(), -1);
        let away = Path::circle((3.0, 0.0), 1.0, 0.0, 0.0, 1.0, 16).unwrap();
        assert_eq!(winding(&away, &ctx()).unwrap(), 0);
        let open = Path::new(vec![at_angle(0.0)], false).unwrap();
        assert!(matches!(winding(&open, &ctx()), Err(Error::Validation(_))));
    }

    proptest! {
        #[test]
        fn loop_law(
            radius in 0.3..3.0f64,
            cx in -0.25..0.25f64,
            cy in -0.25..0.25f64,
            z in -2.0..2.0f64,
            start in -3.1..3.1f64,
            turns in -3i32..=3,
        ) {
            let samples = 40 * (turns.unsigned_abs() as usize).max(1);
            let path = Path::circle((cx * radius, cy * radius), radius, z, start, turns as f64, samples).unwrap();
            for model in [FieldModel::Pseudo, FieldModel::Proper] {
                let r = transport_spinor(&path, model, &ctx()).unwrap();
                prop_assert_eq!(r.winding, Some(turns as i64));
                prop_assert_eq!(winding(&path, &ctx()).unwrap(), turns as i64);
                let sign = if turns % 2 == 0 { 1.0 } else { -1.0 };
                prop_assert!(r.final_spinor.max_abs_diff(&(r.initial * sign)) < 1e-9);
                prop_assert_eq!(r.sign_flip, turns % 2 != 0);
            }
        }

        #[test]
        fn refinement_is_stable(
            radius in 0.3..3.0f64,
            turns in 0.1..2.5f64,
            start in -3.1..3.1f64,
        ) {
            let path = Path::circle((0.0, 0.0), radius, 0.7, start, turns, 60).unwrap();
            let fine = path.refined();
            for model in [FieldModel::Pseudo, FieldModel::Proper] {
                let a = transport_spinor(&path, model, &ctx()).unwrap();
                let b = transport_spinor(&fine, model, &ctx()).unwrap();
                prop_assert!(a.final_spinor.max_abs_diff(&b.final_spinor) < 1e-9);
            }
        }

        #[test]
        fn winding_adds_under_concatenation(w1 in -2i32..=2, w2 in -2i32..=2, radius in 0.5..2.0f64) {
            let loop_of = |w: i32| if w == 0 {
                Path::circle((radius + 1.0, 0.0), 0.5, 0.0, std::f64::consts::PI, 1.0, 16).unwrap()
            } else {
                Path::circle((0.0, 0.0), radius + 0.5, 0.0, 0.0, w as f64, 32 * w.unsigned_abs() as usize).unwrap()
            };
            let (a, b) = (loop_of(w1), loop_of(w2));
            let joined = a.concat(&b).unwrap();
            prop_assert_eq!(winding(&joined, &ctx()).unwrap(), winding(&a, &ctx()).unwrap() + winding(&b, &ctx()).unwrap());
        }

        #[test]
        fn sheet_matches_chart_convention(
            radius in 0.3..3.0f64,
            turns in -2.0..2.0f64,
            start in -3.1..3.1f64,
        ) {
            let path = Path::circle((0.0, 0.0), radius, 0.0, start, turns, 80).unwrap();
            let r = transport_spinor(&path, FieldModel::Pseudo, &ctx()).unwrap();
            let half = 0.5 * r.gamma_end;
            let y = (2.0 * radius).sqrt();
            let p = ChartPoint::new(ChartId::CylindricalParabolic, y * half.cos(), y * half.sin(), 0.0, DomainVariant::ExtendedG).unwrap();
            prop_assert_eq!(sheet_of(&p), r.sheet);
        }
    }
}
