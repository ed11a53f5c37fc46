//! `spinorspace`: sample the spinor fields on grids, map their Cauchy–Riemann
//! residuals, transport them along paths, convert between the two models and
//! run the invariant checks.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure (including
//! paths that hit the axis).

mod checks;
mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinorspace::{BranchContext, FieldModel, GammaMode, Sheet};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] spinorspace::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "spinorspace", version, about = "Spatial spinor fields: sampling, residuals, transport and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a field on a coordinate grid.
    Sample(SampleArgs),
    /// Cauchy–Riemann residuals on a Cartesian grid.
    Residuals(ResidualArgs),
    /// Continue a field along a path read from a JSON file.
    Transport(TransportArgs),
    /// Map a spinor (or the field at a point) to the other model.
    Convert(ConvertArgs),
    /// Run invariant checks.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Pseudo,
    Proper,
}

impl From<ModelArg> for FieldModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Pseudo => FieldModel::Pseudo,
            ModelArg::Proper => FieldModel::Proper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChartArg {
    Cartesian,
    Cylpar,
    Parabolic,
    Spherical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Vector,
    Extended,
    Gprime,
    Gdoubleprime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GammaConvention {
    /// γ ∈ [0, 2π)
    Vector,
    /// γ ∈ [0, 2π) on the first sheet of the doubled space
    Sheet1,
    /// γ ∈ [2π, 4π), the second sheet
    Sheet2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone, Debug)]
pub struct BranchArgs {
    /// Branch of the planar angle γ for Cartesian evaluation.
    #[arg(long, value_enum, default_value = "vector")]
    gamma_convention: GammaConvention,
    /// Mute angle Γ used on the axis.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gamma: f64,
    /// Relative radius of the axis tube.
    #[arg(long, default_value_t = spinorspace::pseudo_model::DEFAULT_AXIS_TOLERANCE)]
    axis_tol: f64,
}

impl BranchArgs {
    pub fn context(&self) -> CliResult<BranchContext> {
        let mode = match self.gamma_convention {
            GammaConvention::Vector => GammaMode::PrincipalVector,
            GammaConvention::Sheet1 => GammaMode::PrincipalExtended(Sheet::First),
            GammaConvention::Sheet2 => GammaMode::PrincipalExtended(Sheet::Second),
        };
        Ok(BranchContext::new(self.gamma, mode, self.axis_tol)?)
    }
}

#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, value_enum, default_value = "cartesian")]
    chart: ChartArg,
    #[arg(long, value_enum, default_value = "vector")]
    variant: VariantArg,
    /// Comma-separated `name=start:stop:count` entries.
    #[arg(long)]
    grid: String,
    #[command(flatten)]
    branch: BranchArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
pub struct ResidualArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Comma-separated `name=start:stop:count` entries over x1, x2, x3.
    #[arg(long)]
    grid: String,
    #[command(flatten)]
    branch: BranchArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
pub struct TransportArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// JSON file `{"points": [[x1, x2, x3], ...], "closed": bool}`.
    #[arg(long)]
    path: PathBuf,
    #[command(flatten)]
    branch: BranchArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
pub struct ConvertArgs {
    /// Model of the input.
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Input spinor as `re1,im1,re2,im2`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "point", required_unless_present = "point")]
    spinor: Option<String>,
    /// Evaluate the input model at `x1,x2,x3` first.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    #[command(flatten)]
    branch: BranchArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
pub struct CheckArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Tolerance scale: each check's threshold is its nominal value times tol/1e-9.
    #[arg(long, env = "SPINORSPACE_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Sample(args) => commands::sample(&args).map(|_| true),
        Command::Residuals(args) => commands::residuals(&args).map(|_| true),
        Command::Transport(args) => commands::transport(&args).map(|_| true),
        Command::Convert(args) => commands::convert(&args).map(|_| true),
        Command::Check(args) => checks::run(&args.suite, args.tol, args.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
