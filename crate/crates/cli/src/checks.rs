//! Invariant checks run by `spinorspace check`.
//!
//! Every check draws its own reproducible random sample (ChaCha8, one stream
//! per check) and reports the largest error it observed. A check passes when
//! that error is at most `nominal × tol / 1e-9`.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinorspace::algebra::{act_on_spinor, act_on_vector, compose, so3_matrix, su2_matrix};
use spinorspace::calculus::{
    chart_dir_deriv, cr_residual_eta, cr_residual_xi, dir_deriv_eta, dir_deriv_xi, singular_dir_deriv,
    ApproachDirection, Direction2, DirectionalDerivative, SingularSet,
};
use spinorspace::charts::{
    antipode, convert_spherical_domain, eta_in_chart, metric, to_cartesian, xi_in_chart, ChartId, ChartPoint,
    DomainVariant,
};
use spinorspace::model_map::{eta_to_xi, xi_to_eta};
use spinorspace::proper_model::{eta_from_proper, pair_from_eta, symmetric_square, HalfSpaceSign};
use spinorspace::pseudo_model::{polar_from_xi, pseudo_from_xi, xi_from_pseudo, xi_from_polar, PseudoVectorState};
use spinorspace::transport::{transport_spinor, Path};
use spinorspace::{BranchContext, FieldModel, GroupElement, Parity, Result, Spinor, Vec3};

use crate::{CliError, CliResult};

/// Tolerance the nominal thresholds are quoted at.
const REFERENCE_TOL: f64 = 1e-9;
const DRAWS: usize = 1000;

type CheckFn = fn(&mut ChaCha8Rng) -> Result<f64>;

struct Check {
    name: &'static str,
    nominal: f64,
    run: CheckFn,
}

const fn check(name: &'static str, nominal: f64, run: CheckFn) -> Check {
    Check { name, nominal, run }
}

const ALGEBRA: &[Check] = &[
    check("hermitian_square_covariance", 1e-12, hermitian_covariance),
    check("symmetric_square_covariance", 1e-12, symmetric_covariance),
    check("double_cover_kernel", 0.0, double_cover),
    check("composition_homomorphism", 1e-12, homomorphism),
    check("su2_unitarity", 1e-12, unitarity),
];

const PSEUDO: &[Check] = &[
    check("round_trip", 1e-10, pseudo_round_trip),
    check("lift_periodicity", 1e-12, pseudo_periodicity),
    check("polar_closure", 1e-12, polar_closure),
];

const PROPER: &[Check] = &[
    check("round_trip", 1e-10, proper_round_trip),
    check("symmetric_square_forms_agree", 1e-12, symmetric_square_agreement),
    check("lift_periodicity", 1e-12, proper_periodicity),
];

const MAP: &[Check] = &[
    check("mutual_inverse", 1e-13, mutual_inverse),
    check("cross_model_identity", 1e-12, cross_model_identity),
];

const CALCULUS: &[Check] = &[
    check("xi_derivative_oracle", 1e-6, xi_oracle),
    check("eta_derivative_oracle", 1e-6, eta_oracle),
    check("chart_derivative_oracle", 1e-6, chart_oracle),
    check("residual_oracle", 1e-6, residual_oracle),
    check("plane_residuals", 1e-10, plane_residuals),
    check("asymptotic_expansions", 1e-3, asymptotics),
    check("cut_antisymmetry", 0.0, cut_antisymmetry),
];

const CHARTS: &[Check] = &[
    check("metric_pullback", 1e-8, metric_pullback),
    check("cylindrical_metric_exact", 0.0, cylindrical_metric_exact),
    check("parabolic_polar_parameters", 1e-12, parabolic_polar),
    check("spherical_domain_conversion", 1e-12, spherical_conversion),
    check("antipode_sign", 1e-12, antipode_sign),
];

const TRANSPORT: &[Check] = &[
    check("loop_law", 1e-9, loop_law),
    check("refinement_stability", 1e-9, refinement),
];

const SUITES: &[(&str, &[Check])] = &[
    ("algebra", ALGEBRA),
    ("pseudo", PSEUDO),
    ("proper", PROPER),
    ("map", MAP),
    ("calculus", CALCULUS),
    ("charts", CHARTS),
    ("transport", TRANSPORT),
];

/// Runs the suite and prints one line per check. Returns whether all passed.
pub fn run(suite: &str, tol: f64, seed: u64) -> CliResult<bool> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Invalid(format!("tolerance {tol} must be positive")));
    }
    let selected: Vec<&(&str, &[Check])> = match suite {
        "all" => SUITES.iter().collect(),
        name => SUITES.iter().filter(|(s, _)| *s == name).collect(),
    };
    if selected.is_empty() {
        let known: Vec<&str> = SUITES.iter().map(|(s, _)| *s).collect();
        return Err(CliError::Invalid(format!(
            "unknown suite `{suite}`; expected all or one of {}",
            known.join(", ")
        )));
    }
    let scale = tol / REFERENCE_TOL;
    let mut all_pass = true;
    let mut stream = 0u64;
    for (suite_name, checks) in selected {
        for c in checks.iter() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            stream += 1;
            let threshold = c.nominal * scale;
            let max_err = (c.run)(&mut rng)?;
            let pass = max_err <= threshold;
            all_pass &= pass;
            println!(
                "{} {suite_name}/{} max_err={max_err:.3e} threshold={threshold:.3e}",
                if pass { "PASS" } else { "FAIL" },
                c.name
            );
        }
    }
    Ok(all_pass)
}

fn unit_quaternion(rng: &mut ChaCha8Rng) -> GroupElement {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.1 {
            return GroupElement::new(q[0] / n, Vec3::new(q[1] / n, q[2] / n, q[3] / n), Parity::Proper)
                .expect("normalized");
        }
    }
}

fn spinor(rng: &mut ChaCha8Rng) -> Spinor {
    let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
    Spinor::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
}

fn off_axis(rng: &mut ChaCha8Rng, rho_min: f64, rho_max: f64, z_max: f64) -> Vec3 {
    let rho = rng.gen_range(rho_min..rho_max);
    let g = rng.gen_range(-PI..PI);
    Vec3::new(rho * g.cos(), rho * g.sin(), rng.gen_range(-z_max..z_max))
}

/// Point with planar radius above 1e−6 and size spread over six decades.
fn wide_point(rng: &mut ChaCha8Rng) -> Vec3 {
    let size = 10f64.powf(rng.gen_range(-3.0..3.0));
    let rho = (size * rng.gen_range(0.0..1.0f64)).max(1e-6);
    let g = rng.gen_range(-PI..PI);
    Vec3::new(rho * g.cos(), rho * g.sin(), size * rng.gen_range(-1.0..1.0))
}

fn direction(rng: &mut ChaCha8Rng) -> Direction2 {
    Direction2::from_angle(rng.gen_range(-PI..PI))
}

fn max_of(draws: usize, mut f: impl FnMut() -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let e = f()?;
        worst = if e.is_nan() { f64::INFINITY } else { worst.max(e) };
    }
    Ok(worst)
}

fn hermitian_covariance(rng: &mut ChaCha8Rng) -> Result<f64> {
    max_of(DRAWS, || {
        let (g, s) = (unit_quaternion(rng), spinor(rng));
        let (_, a) = pseudo_from_xi(&s);
        let (_, moved) = pseudo_from_xi(&act_on_spinor(&g, &s));
        Ok((moved - act_on_vector(&g, &a)).norm() / (1.0 + a.norm()))
    })
}

fn symmetric_covariance(rng: &mut ChaCha8Rng) -> Result<f64> {
    max_of(DRAWS, || {
        let (g, s) = (unit_quaternion(rng), spinor(rng));
        let before = pair_from_eta(&s);
        let after = pair_from_eta(&act_on_spinor(&g, &s));
        let scale = 1.0 + before.b();
        Ok(((after.bvec - act_on_vector(&g, &before.bvec)).norm())
            .max((after.cvec - act_on_vector(&g, &before.cvec)).norm())
            / scale)
    })
}

fn double_cover(rng: &mut ChaCha8Rng) -> Result<f64> {
    max_of(DRAWS, || {
        let g = unit_quaternion(rng);
        Ok((so3_matrix(&g)?.0 - so3_matrix(&g.negated())?.0).abs().max())
    })
}

fn homomorphism(rng: &mut ChaCha8Rng) -> Result<f64> {
    max_of(DRAWS, || {
        let (g, h) = (unit_quaternion(rng), unit_quaternion(rng));
        let gh = compose(&g, &h);
        let rot = (so3_matrix(&gh)?.0 - so3_matrix(&g)?.0 * so3_matrix(&h)?.0).abs().max();
        let spin = (su2_matrix(&gh)? - su2_matrix(&g)? * su2_matrix(&h)?).map(|z| z.norm()).max();
        Ok(rot.max(spin))
    })
}

fn unitarity(rng: &mut ChaCha8Rng) -> Result<f64> {
    max_of(DRAWS, || {
        let b = su2_matrix(&unit_quaternion(rng))?;
        let defect = b.adjoint() * b - nalgebra::Matrix2::identity();
        Ok(defect.map(|z| z.norm()).max().max((b.determinant() - 1.0).norm()))
    })
}

fn pseudo_round_trip(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(10 * DRAWS, || {
        let a = wide_point(rng);
        let (len, back) = pseudo_from_xi(&xi_from_pseudo(&PseudoVectorState(a), &ctx));
        Ok(((back - a).norm() / a.norm()).max((len - a.norm()).abs() / a.norm()))
    })
}

fn proper_round_trip(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(10 * DRAWS, || {
        let b = wide_point(rng);
        let pair = pair_from_eta(&eta_from_proper(&b, &ctx));
        Ok((pair.bvec - b).norm() / b.norm())
    })
}

fn periodicity(rng: &mut ChaCha8Rng, field: fn(&Vec3, &BranchContext) -> Spinor) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS, || {
        let x = off_axis(rng, 0.01, 3.0, 3.0);
        let hint = rng.gen_range(-4.0 * PI..4.0 * PI);
        let base = field(&x, &ctx.lifted(hint));
        let once = field(&x, &ctx.lifted(hint + TAU));
        let twice = field(&x, &ctx.lifted(hint + 2.0 * TAU));
        Ok(once.max_abs_diff(&-base).max(twice.max_abs_diff(&base)) / (1.0 + base.norm()))
    })
}

fn xi_field(x: &Vec3, ctx: &BranchContext) -> Spinor {
    xi_from_pseudo(&PseudoVectorState(*x), ctx)
}

fn pseudo_periodicity(rng: &mut ChaCha8Rng) -> Result<f64> {
    periodicity(rng, xi_field)
}

fn proper_periodicity(rng: &mut ChaCha8Rng) -> Result<f64> {
    periodicity(rng, eta_from_proper)
}

fn polar_closure(rng: &mut ChaCha8Rng) -> Result<f64> {
    max_of(DRAWS, || {
        let s = spinor(rng);
        Ok(xi_from_polar(&polar_from_xi(&s), true).max_abs_diff(&s) / (1.0 + s.norm()))
    })
}

fn symmetric_square_agreement(rng: &mut ChaCha8Rng) -> Result<f64> {
    max_of(DRAWS, || {
        let s = spinor(rng);
        let pair = pair_from_eta(&s);
        let direct = symmetric_square(&s);
        let err = (0..3)
            .map(|k| (direct[k] - Complex64::new(pair.cvec[k], pair.bvec[k])).norm())
            .fold(0.0, f64::max);
        Ok(err / (1.0 + s.norm_sqr()))
    })
}

fn mutual_inverse(rng: &mut ChaCha8Rng) -> Result<f64> {
    max_of(DRAWS, || {
        let s = spinor(rng);
        let e = eta_to_xi(&xi_to_eta(&s)).max_abs_diff(&s);
        Ok(e.max(xi_to_eta(&eta_to_xi(&s)).max_abs_diff(&s)) / (1.0 + s.norm()))
    })
}

fn cross_model_identity(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    let tabulated = [
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
        Vec3::new(0.0, 0.0, -1.0),
        Vec3::new(3.0, 0.0, 4.0),
        Vec3::new(3.0, 0.0, -4.0),
    ];
    let mut worst = 0.0f64;
    for x in tabulated {
        worst = worst.max(xi_to_eta(&xi_field(&x, &ctx)).max_abs_diff(&eta_from_proper(&x, &ctx)));
    }
    let random = max_of(10 * DRAWS, || {
        let x = off_axis(rng, 1e-3, 5.0, 5.0);
        let lifted = ctx.lifted(ctx.gamma_at(&x) + TAU * f64::from(rng.gen_range(-2i32..=2)));
        let eta = eta_from_proper(&x, &lifted);
        Ok(xi_to_eta(&xi_field(&x, &lifted)).max_abs_diff(&eta) / (1.0 + eta.norm()))
    })?;
    Ok(worst.max(random))
}

/// Central difference along planar `w` with `γ` continued from `x`.
fn planar_fd(field: fn(&Vec3, &BranchContext) -> Spinor, x: &Vec3, w: [f64; 2]) -> DirectionalDerivative {
    let base = BranchContext::default();
    let ctx = base.lifted(base.gamma_at(x));
    let h = 1e-6 * (1.0 + x.norm());
    let step = Vec3::new(w[0] * h, w[1] * h, 0.0);
    let diff = (field(&(x + step), &ctx) - field(&(x - step), &ctx)) * (0.5 / h);
    DirectionalDerivative { d1: diff.c1, d2: diff.c2 }
}

fn relative(d: &DirectionalDerivative, reference: &DirectionalDerivative) -> f64 {
    let scale = d.d1.norm().max(d.d2.norm());
    d.max_abs_diff(reference) / scale
}

fn xi_oracle(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS, || {
        let x = off_axis(rng, 0.1, 3.0, 3.0);
        let n = direction(rng);
        let d = dir_deriv_xi(&PseudoVectorState(x), n, &ctx)?;
        Ok(relative(&d, &planar_fd(xi_field, &x, n.as_array())))
    })
}

fn eta_oracle(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS, || {
        let x = off_axis(rng, 0.1, 3.0, 3.0);
        let n = direction(rng);
        let d = dir_deriv_eta(&x, n, &ctx)?;
        Ok(relative(&d, &planar_fd(eta_from_proper, &x, n.as_array())))
    })
}

fn chart_oracle(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS, || {
        let radius = rng.gen_range(0.3..2.5);
        let angle = rng.gen_range(-PI..PI);
        let (y1, y2, y3) = (radius * angle.cos(), radius * angle.sin(), rng.gen_range(-3.0..3.0));
        let nu = direction(rng);
        let h = 1e-6 * (1.0 + radius.hypot(y3));
        let at = |t: f64| {
            ChartPoint::new(ChartId::CylindricalParabolic, y1 + t * nu.n1(), y2 + t * nu.n2(), y3, DomainVariant::ExtendedG)
        };
        let p = at(0.0)?;
        let (fwd, bwd) = (at(h)?, at(-h)?);
        let mut worst = 0.0f64;
        for model in [FieldModel::Pseudo, FieldModel::Proper] {
            let field = |q: &ChartPoint| match model {
                FieldModel::Pseudo => xi_in_chart(q, &ctx),
                FieldModel::Proper => eta_in_chart(q, &ctx),
            };
            let diff = (field(&fwd) - field(&bwd)) * (0.5 / h);
            let d = chart_dir_deriv(&p, model, nu, &ctx)?;
            worst = worst.max(relative(&d, &DirectionalDerivative { d1: diff.c1, d2: diff.c2 }));
        }
        Ok(worst)
    })
}

fn residual_from_fd(field: fn(&Vec3, &BranchContext) -> Spinor, x: &Vec3) -> [f64; 4] {
    let (d_x1, d_x2) = (planar_fd(field, x, [1.0, 0.0]), planar_fd(field, x, [0.0, 1.0]));
    let i = Complex64::new(0.0, 1.0);
    let (first, second) = (d_x1.d1 + i * d_x2.d1, d_x1.d2 + i * d_x2.d2);
    [first.re, first.im, second.re, second.im]
}

fn residual_oracle(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS, || {
        let x = off_axis(rng, 0.1, 3.0, 3.0);
        let xi = cr_residual_xi(&PseudoVectorState(x), &ctx)?.to_array();
        let eta = cr_residual_eta(&x, HalfSpaceSign::of(x.z), &ctx)?.to_array();
        let mut worst = 0.0f64;
        for (closed, fd) in [(xi, residual_from_fd(xi_field, &x)), (eta, residual_from_fd(eta_from_proper, &x))] {
            for (c, f) in closed.iter().zip(fd) {
                worst = worst.max((c - f).abs() / (1.0f64).max(c.abs()));
            }
        }
        Ok(worst)
    })
}

fn plane_residuals(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    let unit = cr_residual_xi(&PseudoVectorState::new(1.0, 0.0, 0.0), &ctx)?;
    let anchor = (unit.d1 - 1.0).abs();
    let sampled = max_of(DRAWS, || {
        let mut x = off_axis(rng, 0.01, 5.0, 1.0);
        x.z = 0.0;
        let eta = cr_residual_eta(&x, HalfSpaceSign::Plus, &ctx)?.max_abs();
        let xi = cr_residual_xi(&PseudoVectorState(x), &ctx)?;
        Ok(eta.max(xi.d3.abs()).max(xi.d4.abs()))
    })?;
    Ok(anchor.max(sampled))
}

fn asymptotics(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS, || {
        let set = [SingularSet::Axis, SingularSet::PlaneOrigin, SingularSet::InfiniteBoundary][rng.gen_range(0..3)];
        let model = if rng.gen_bool(0.5) { FieldModel::Pseudo } else { FieldModel::Proper };
        let n = direction(rng);
        let mu = rng.gen_range(0.05..PI - 0.05) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let m = ApproachDirection::from_angle(mu);
        let anchor = match set {
            SingularSet::Axis => Vec3::new(0.0, 0.0, rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }),
            SingularSet::InfiniteBoundary => Vec3::new(0.0, 0.0, rng.gen_range(-2.0..2.0)),
            _ => Vec3::zeros(),
        };
        let k = singular_dir_deriv(set, &anchor, model, n, m, &ctx)?;
        let lifted = ctx.lifted(mu);
        let mut worst = 0.0f64;
        for eps in [1e-4, 1e-5] {
            let x = match set {
                SingularSet::InfiniteBoundary => Vec3::new(m.m1() / eps, m.m2() / eps, anchor.z),
                _ => anchor + Vec3::new(m.m1() * eps, m.m2() * eps, 0.0),
            };
            let exact = match model {
                FieldModel::Pseudo => dir_deriv_xi(&PseudoVectorState(x), n, &lifted)?,
                FieldModel::Proper => dir_deriv_eta(&x, n, &lifted)?,
            };
            let power = if k.half_power { eps.sqrt() } else { 1.0 };
            let leading = DirectionalDerivative {
                d1: (k.kminus[0] / eps + k.kzero[0]) * power,
                d2: (k.kminus[1] / eps + k.kzero[1]) * power,
            };
            worst = worst.max(relative(&exact, &leading));
        }
        Ok(worst)
    })
}

fn cut_antisymmetry(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS, || {
        let anchor = Vec3::new(rng.gen_range(0.1..3.0), 0.0, rng.gen_range(-2.0..2.0));
        let n = direction(rng);
        let m = ApproachDirection::from_angle(rng.gen_range(0.05..PI - 0.05));
        let mirrored = ApproachDirection::new(m.m1(), -m.m2())?;
        let mut worst = 0.0f64;
        for model in [FieldModel::Pseudo, FieldModel::Proper] {
            let up = singular_dir_deriv(SingularSet::Cut, &anchor, model, n, m, &ctx)?;
            let down = singular_dir_deriv(SingularSet::Cut, &anchor, model, n, mirrored, &ctx)?;
            for c in 0..2 {
                worst = worst.max((up.kzero[c] + down.kzero[c]).norm());
            }
        }
        Ok(worst)
    })
}

fn random_extended(rng: &mut ChaCha8Rng, chart: ChartId) -> Result<ChartPoint> {
    let (u, v, t) = (rng.gen_range(0.2..2.0), rng.gen_range(0.2..2.0), rng.gen_range(0.0..1.0));
    let (y1, y2, y3) = match chart {
        ChartId::CylindricalParabolic => (u * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, v - 1.1, 4.0 * t - 2.0),
        ChartId::Parabolic => (u, v, 0.1 + t * (2.0 * TAU - 0.2)),
        ChartId::Spherical => (u, 0.1 + 0.45 * v * (PI - 0.2), -TAU + 0.1 + t * (2.0 * TAU - 0.2)),
    };
    ChartPoint::new(chart, y1, y2, y3, DomainVariant::ExtendedG)
}

const CHARTS_ALL: [ChartId; 3] = [ChartId::CylindricalParabolic, ChartId::Parabolic, ChartId::Spherical];

fn jacobian(p: &ChartPoint) -> Result<Matrix3<f64>> {
    let y = p.coords();
    let mut j = Matrix3::zeros();
    for k in 0..3 {
        let h = 1e-6 * (1.0 + y[k].abs());
        let mut fwd = y;
        let mut bwd = y;
        fwd[k] += h;
        bwd[k] -= h;
        let at = |q: [f64; 3]| ChartPoint::new(p.chart(), q[0], q[1], q[2], DomainVariant::ExtendedG).map(|c| to_cartesian(&c));
        j.set_column(k, &((at(fwd)? - at(bwd)?) / (2.0 * h)));
    }
    Ok(j)
}

fn metric_pullback(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for chart in CHARTS_ALL {
        worst = worst.max(max_of(100, || {
            let p = random_extended(rng, chart)?;
            let j = jacobian(&p)?;
            let g = metric(&p);
            Ok((j.transpose() * j - g).abs().max() / (1.0 + g.abs().max()))
        })?);
    }
    Ok(worst)
}

fn cylindrical_metric_exact(rng: &mut ChaCha8Rng) -> Result<f64> {
    max_of(DRAWS, || {
        let p = random_extended(rng, ChartId::CylindricalParabolic)?;
        let [y1, y2, _] = p.coords();
        let s = y1 * y1 + y2 * y2;
        Ok((metric(&p) - Matrix3::from_diagonal(&Vec3::new(s, s, 1.0))).abs().max())
    })
}

fn parabolic_polar(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS, || {
        let (y1, y2, y3) = (rng.gen_range(0.01..3.0), rng.gen_range(0.01..3.0), rng.gen_range(0.0..2.0 * TAU));
        let p = ChartPoint::new(ChartId::Parabolic, y1, y2, y3, DomainVariant::ExtendedG)?;
        let polar = polar_from_xi(&xi_in_chart(&p, &ctx));
        let wrapped = (polar.gamma() - y3).rem_euclid(2.0 * TAU);
        let gamma_err = wrapped.min(2.0 * TAU - wrapped);
        Ok((polar.first_modulus - y1).abs().max((polar.second_modulus - y2).abs()).max(gamma_err))
    })
}

fn spherical_conversion(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS, || {
        let p = ChartPoint::new(
            ChartId::Spherical,
            rng.gen_range(0.01..3.0),
            rng.gen_range(0.0..PI),
            rng.gen_range(-TAU..TAU),
            DomainVariant::ExtendedG,
        )?;
        let reference = xi_in_chart(&p, &ctx);
        let mut worst = 0.0f64;
        for target in [DomainVariant::SphericalGPrime, DomainVariant::SphericalGDoublePrime] {
            let q = convert_spherical_domain(&p, target)?;
            worst = worst.max(xi_in_chart(&q, &ctx).max_abs_diff(&reference));
            let back = convert_spherical_domain(&q, DomainVariant::ExtendedG)?;
            worst = worst.max(xi_in_chart(&back, &ctx).max_abs_diff(&reference));
        }
        Ok(worst)
    })
}

fn antipode_sign(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    let mut worst = 0.0f64;
    for chart in CHARTS_ALL {
        worst = worst.max(max_of(DRAWS, || {
            let p = random_extended(rng, chart)?;
            let q = antipode(&p)?;
            let xi = xi_in_chart(&p, &ctx).max_abs_diff(&-xi_in_chart(&q, &ctx));
            let eta = eta_in_chart(&p, &ctx).max_abs_diff(&-eta_in_chart(&q, &ctx));
            let same_point = (to_cartesian(&p) - to_cartesian(&q)).norm() / (1.0 + to_cartesian(&p).norm());
            Ok(xi.max(eta).max(same_point))
        })?);
    }
    Ok(worst)
}

fn random_loop(rng: &mut ChaCha8Rng, winding: i32) -> Result<Path> {
    let radius = rng.gen_range(0.3..3.0);
    let z = rng.gen_range(-2.0..2.0);
    let start = rng.gen_range(-PI..PI);
    if winding == 0 {
        Path::circle((2.0 * radius, 0.0), 0.5 * radius, z, start, 1.0, 100)
    } else {
        let center = (rng.gen_range(-0.3..0.3) * radius, rng.gen_range(-0.3..0.3) * radius);
        Path::circle(center, radius, z, start, f64::from(winding), 100)
    }
}

fn loop_law(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS / 4, || {
        let w = rng.gen_range(-2i32..=2);
        let path = random_loop(rng, w)?;
        let mut worst = 0.0f64;
        for model in [FieldModel::Pseudo, FieldModel::Proper] {
            let r = transport_spinor(&path, model, &ctx)?;
            if r.winding != Some(i64::from(w)) {
                return Ok(f64::INFINITY);
            }
            let sign = if w % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max(r.final_spinor.max_abs_diff(&(r.initial * sign)));
        }
        Ok(worst)
    })
}

fn refinement(rng: &mut ChaCha8Rng) -> Result<f64> {
    let ctx = BranchContext::default();
    max_of(DRAWS / 4, || {
        let turns = rng.gen_range(-2.0..2.0);
        let path = Path::circle((0.0, 0.0), rng.gen_range(0.3..3.0), rng.gen_range(-2.0..2.0), 0.0, turns, 100)?;
        let fine = path.refined();
        let mut worst = 0.0f64;
        for model in [FieldModel::Pseudo, FieldModel::Proper] {
            let (a, b) = (transport_spinor(&path, model, &ctx)?, transport_spinor(&fine, model, &ctx)?);
            worst = worst.max(a.final_spinor.max_abs_diff(&b.final_spinor));
        }
        Ok(worst)
    })
}
