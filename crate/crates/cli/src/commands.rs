use std::fs;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use spinorspace::calculus::{cr_residual_eta, cr_residual_xi};
use spinorspace::charts::{eta_in_chart, sheet_of, to_cartesian, xi_in_chart, ChartId, ChartPoint, DomainVariant};
use spinorspace::model_map::{eta_to_xi, xi_to_eta};
use spinorspace::proper_model::{eta_from_proper, pair_from_eta, HalfSpaceSign};
use spinorspace::pseudo_model::{pseudo_from_xi, xi_from_pseudo, PseudoVectorState};
use spinorspace::transport::{transport_spinor, Path};
use spinorspace::{BranchContext, Error, FieldModel, GammaMode, Spinor, Vec3};

use crate::grid::Grid;
use crate::output::{emit, emit_one, num, opt_num, Record};
use crate::{
    ChartArg, CliError, CliResult, ConvertArgs, Format, ResidualArgs, SampleArgs, TransportArgs, VariantArg,
};

const CARTESIAN_NAMES: [&[&str]; 3] = [&["x1", "y1"], &["x2", "y2"], &["x3", "y3"]];
const CHART_NAMES: [&[&str]; 3] = [&["y1"], &["y2"], &["y3"]];
const SPHERICAL_NAMES: [&[&str]; 3] = [&["r", "y1"], &["theta", "y2"], &["phi", "y3"]];

fn finite(s: Spinor) -> CliResult<Spinor> {
    if s.is_finite() {
        Ok(s)
    } else {
        Err(CliError::Numerical("field value is not finite".into()))
    }
}

fn variant(v: VariantArg) -> DomainVariant {
    match v {
        VariantArg::Vector => DomainVariant::VectorG,
        VariantArg::Extended => DomainVariant::ExtendedG,
        VariantArg::Gprime => DomainVariant::SphericalGPrime,
        VariantArg::Gdoubleprime => DomainVariant::SphericalGDoublePrime,
    }
}

fn cartesian_field(model: FieldModel, x: &Vec3, ctx: &BranchContext) -> Spinor {
    match model {
        FieldModel::Pseudo => xi_from_pseudo(&PseudoVectorState(*x), ctx),
        FieldModel::Proper => eta_from_proper(x, ctx),
    }
}

#[derive(Serialize)]
struct SampleRow {
    y1: f64,
    y2: f64,
    y3: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    sheet: u8,
    re1: f64,
    im1: f64,
    re2: f64,
    im2: f64,
}

impl Record for SampleRow {
    const HEADER: &'static [&'static str] = &["y1", "y2", "y3", "x1", "x2", "x3", "sheet", "re1", "im1", "re2", "im2"];

    fn fields(&self) -> Vec<String> {
        let mut f: Vec<String> = [self.y1, self.y2, self.y3, self.x1, self.x2, self.x3].map(num).into();
        f.push(self.sheet.to_string());
        f.extend([self.re1, self.im1, self.re2, self.im2].map(num));
        f
    }
}

fn sample_row(y: [f64; 3], x: Vec3, sheet: u8, s: Spinor) -> SampleRow {
    let [re1, im1, re2, im2] = s.to_array();
    SampleRow {
        y1: y[0],
        y2: y[1],
        y3: y[2],
        x1: x.x,
        x2: x.y,
        x3: x.z,
        sheet,
        re1,
        im1,
        re2,
        im2,
    }
}

pub fn sample(args: &SampleArgs) -> CliResult<()> {
    let ctx = args.branch.context()?;
    let model = FieldModel::from(args.model);
    let chart = match args.chart {
        ChartArg::Cartesian => None,
        ChartArg::Cylpar => Some(ChartId::CylindricalParabolic),
        ChartArg::Parabolic => Some(ChartId::Parabolic),
        ChartArg::Spherical => Some(ChartId::Spherical),
    };
    let names = match chart {
        None => CARTESIAN_NAMES,
        Some(ChartId::Spherical) => SPHERICAL_NAMES,
        Some(_) => CHART_NAMES,
    };
    let grid = Grid::parse(&args.grid, names)?;
    let cartesian_sheet = match ctx.gamma_mode {
        GammaMode::PrincipalExtended(sheet) => sheet.index(),
        _ => 1,
    };
    let mut rows = Vec::with_capacity(grid.len());
    for y in grid.nodes() {
        let row = match chart {
            None => {
                let x = Vec3::from(y);
                sample_row(y, x, cartesian_sheet, finite(cartesian_field(model, &x, &ctx))?)
            }
            Some(id) => {
                let p = ChartPoint::new(id, y[0], y[1], y[2], variant(args.variant))?;
                let s = match model {
                    FieldModel::Pseudo => xi_in_chart(&p, &ctx),
                    FieldModel::Proper => eta_in_chart(&p, &ctx),
                };
                sample_row(y, to_cartesian(&p), sheet_of(&p).index(), finite(s)?)
            }
        };
        rows.push(row);
    }
    emit(&rows, args.output.format.unwrap_or(Format::Csv), args.output.out.as_deref())
}

#[derive(Serialize)]
struct ResidualRow {
    x1: f64,
    x2: f64,
    x3: f64,
    status: &'static str,
    #[serde(rename = "D1")]
    d1: Option<f64>,
    #[serde(rename = "D2")]
    d2: Option<f64>,
    #[serde(rename = "D3")]
    d3: Option<f64>,
    #[serde(rename = "D4")]
    d4: Option<f64>,
}

impl Record for ResidualRow {
    const HEADER: &'static [&'static str] = &["x1", "x2", "x3", "status", "D1", "D2", "D3", "D4"];

    fn fields(&self) -> Vec<String> {
        let mut f: Vec<String> = [self.x1, self.x2, self.x3].map(num).into();
        f.push(self.status.to_string());
        f.extend([self.d1, self.d2, self.d3, self.d4].map(opt_num));
        f
    }
}

pub fn residuals(args: &ResidualArgs) -> CliResult<()> {
    let ctx = args.branch.context()?;
    let grid = Grid::parse(&args.grid, CARTESIAN_NAMES)?;
    let mut rows = Vec::with_capacity(grid.len());
    for y in grid.nodes() {
        let x = Vec3::from(y);
        let residual = match args.model.into() {
            FieldModel::Pseudo => cr_residual_xi(&PseudoVectorState(x), &ctx),
            FieldModel::Proper => cr_residual_eta(&x, HalfSpaceSign::of(x.z), &ctx),
        };
        let row = match residual {
            Ok(r) => {
                if !r.to_array().iter().all(|d| d.is_finite()) {
                    return Err(CliError::Numerical(format!("residual at {y:?} is not finite")));
                }
                ResidualRow {
                    x1: y[0],
                    x2: y[1],
                    x3: y[2],
                    status: "ok",
                    d1: Some(r.d1),
                    d2: Some(r.d2),
                    d3: Some(r.d3),
                    d4: Some(r.d4),
                }
            }
            Err(Error::SingularPoint(_)) => ResidualRow {
                x1: y[0],
                x2: y[1],
                x3: y[2],
                status: "singular",
                d1: None,
                d2: None,
                d3: None,
                d4: None,
            },
            Err(e) => return Err(e.into()),
        };
        rows.push(row);
    }
    emit(&rows, args.output.format.unwrap_or(Format::Csv), args.output.out.as_deref())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PathFile {
    points: Vec<[f64; 3]>,
    #[serde(default)]
    closed: bool,
}

#[derive(Serialize)]
struct TransportRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    winding: Option<i64>,
    gamma_end: f64,
    #[serde(rename = "final")]
    final_spinor: [f64; 4],
    sign_flip: bool,
}

impl Record for TransportRecord {
    const HEADER: &'static [&'static str] = &["winding", "gamma_end", "re1", "im1", "re2", "im2", "sign_flip"];

    fn fields(&self) -> Vec<String> {
        let mut f = vec![self.winding.map(|w| w.to_string()).unwrap_or_default(), num(self.gamma_end)];
        f.extend(self.final_spinor.map(num));
        f.push(self.sign_flip.to_string());
        f
    }
}

pub fn transport(args: &TransportArgs) -> CliResult<()> {
    let ctx = args.branch.context()?;
    let text = fs::read_to_string(&args.path)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", args.path.display())))?;
    let file: PathFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("malformed path file {}: {e}", args.path.display())))?;
    let path = Path::new(file.points.into_iter().map(Vec3::from).collect(), file.closed)?;
    let result = transport_spinor(&path, args.model.into(), &ctx)?;
    let record = TransportRecord {
        winding: result.winding,
        gamma_end: result.gamma_end,
        final_spinor: result.final_spinor.to_array(),
        sign_flip: result.sign_flip,
    };
    emit_one(&record, args.output.format.unwrap_or(Format::Json), args.output.out.as_deref())
}

#[derive(Serialize)]
struct ConvertRecord {
    model: &'static str,
    re1: f64,
    im1: f64,
    re2: f64,
    im2: f64,
    v1: f64,
    v2: f64,
    v3: f64,
}

impl Record for ConvertRecord {
    const HEADER: &'static [&'static str] = &["model", "re1", "im1", "re2", "im2", "v1", "v2", "v3"];

    fn fields(&self) -> Vec<String> {
        let mut f = vec![self.model.to_string()];
        f.extend([self.re1, self.im1, self.re2, self.im2, self.v1, self.v2, self.v3].map(num));
        f
    }
}

fn parse_numbers<const N: usize>(text: &str, what: &str) -> CliResult<[f64; N]> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| CliError::Invalid(format!("{what} `{text}` must be {N} comma-separated finite numbers")))?;
    values
        .try_into()
        .map_err(|_| CliError::Invalid(format!("{what} `{text}` must have {N} entries")))
}

/// Input spinor of the source model mapped to the other model, together
/// with the vector the output spinor squares to.
pub fn convert(args: &ConvertArgs) -> CliResult<()> {
    let ctx = args.branch.context()?;
    let model = FieldModel::from(args.model);
    let input = match (&args.spinor, &args.point) {
        (Some(text), _) => {
            let [a, b, c, d] = parse_numbers::<4>(text, "spinor")?;
            Spinor::new(Complex64::new(a, b), Complex64::new(c, d))
        }
        (None, Some(text)) => cartesian_field(model, &Vec3::from(parse_numbers::<3>(text, "point")?), &ctx),
        (None, None) => return Err(CliError::Invalid("give --spinor or --point".into())),
    };
    let (name, output, vector) = match model {
        FieldModel::Pseudo => {
            let eta = xi_to_eta(&input);
            ("proper", eta, pair_from_eta(&eta).bvec)
        }
        FieldModel::Proper => {
            let xi = eta_to_xi(&input);
            ("pseudo", xi, pseudo_from_xi(&xi).1)
        }
    };
    let [re1, im1, re2, im2] = finite(output)?.to_array();
    let record = ConvertRecord {
        model: name,
        re1,
        im1,
        re2,
        im2,
        v1: vector.x,
        v2: vector.y,
        v3: vector.z,
    };
    emit_one(&record, args.output.format.unwrap_or(Format::Csv), args.output.out.as_deref())
}
