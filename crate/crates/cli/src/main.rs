//! `l1min`: solve ℓ1 problems from CSV files or generated instances and run
//! the benchmark sweeps.
//!
//! Exit status: 0 on success, 1 when a solver did not converge (results are
//! still written) or failed numerically, 2 on usage and input errors.

mod commands;
mod io;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use l1min::bench::GridSpec;
use l1min::{Algorithm, AlignMethod};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input, inconsistent dimensions.
    Usage(String),
    /// The solver itself failed.
    Solver(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Usage(format!("cannot write {}: {e}", path.display()))
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Solver(m) => f.write_str(m),
        }
    }
}

impl From<l1min::L1Error> for CliError {
    fn from(e: l1min::L1Error) -> Self {
        use l1min::L1Error::*;
        match e {
            InvalidArgument(_) | DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

/// Outcome of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    NotConverged,
}

#[derive(Parser)]
#[command(name = "l1min", version, about = "ℓ1-minimization solvers and benchmark sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write a result JSON
    Solve(SolveArgs),
    /// Generate an instance as CSV files
    Gen(GenArgs),
    /// Success-rate grid over sparsity and sampling rates
    Phase(PhaseArgs),
    /// Error, time and iterations of several solvers along d or k
    NoiseSweep(NoiseSweepArgs),
    /// Sparse signal plus sparse error over a (bouquet) dictionary
    Cab(CabArgs),
    /// Robust fit b = Bw + e with sparse e
    Align(AlignArgs),
    /// Summarize a phase or sweep summary JSON, optionally as SVG
    Report(ReportArgs),
}

/// Solver settings shared by the solving subcommands.
#[derive(Args, Clone, Default)]
pub struct ConfigArgs {
    /// JSON file with solver settings; the flags below override it
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Weight of the ℓ1 term in ½‖b − Ax‖² + λ‖x‖₁
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

/// Shape of a generated Gaussian instance.
#[derive(Args, Clone)]
pub struct ShapeArgs {
    /// Signal length (columns of A)
    #[arg(long, requires_all = ["d", "k"])]
    pub n: Option<usize>,
    /// Number of measurements (rows of A)
    #[arg(long, requires_all = ["n", "k"])]
    pub d: Option<usize>,
    /// Nonzeros in the signal
    #[arg(long, requires_all = ["n", "d"])]
    pub k: Option<usize>,
    /// Standard deviation of additive Gaussian noise
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Fraction of measurements replaced by gross errors
    #[arg(long, default_value_t = 0.0)]
    pub corruption: f64,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long, default_value = "fista")]
    pub algo: Algorithm,
    /// Dictionary CSV (d rows, n columns)
    #[arg(long, value_name = "FILE", requires = "rhs", conflicts_with_all = ["n", "d", "k"])]
    pub matrix: Option<PathBuf>,
    /// Observation CSV (d values)
    #[arg(long, value_name = "FILE", requires = "matrix")]
    pub rhs: Option<PathBuf>,
    /// Known signal CSV, used to report the relative error
    #[arg(long, value_name = "FILE", requires = "matrix")]
    pub truth: Option<PathBuf>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Seed of the generated instance
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Result JSON (default: result.json)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0.0)]
    pub corruption: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for A.csv, b.csv, x0.csv and gen.json (default: $L1MIN_OUT_DIR or .)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PhaseArgs {
    #[arg(long, default_value = "homotopy")]
    pub algo: Algorithm,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// RxD uniform grid: ρ = i/R, δ = j/D
    #[arg(long, default_value = "16x16")]
    pub grid: GridSpec,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Relative error counted as a success
    #[arg(long, default_value_t = 1e-3)]
    pub success_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Grid CSV (default: phase.csv); a summary JSON is written beside it
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also draw the grid and its contour as SVG
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
    /// Success level of the drawn contour
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Axis {
    /// Vary the number of measurements d at fixed n, k
    VaryD,
    /// Vary the sparsity k at fixed n, d
    VaryK,
}

#[derive(Args)]
pub struct NoiseSweepArgs {
    #[arg(long, value_enum, default_value = "vary-d")]
    pub mode: Axis,
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    /// Sparsity when varying d
    #[arg(long, default_value_t = 40)]
    pub k: usize,
    /// Measurements when varying k
    #[arg(long, default_value_t = 300)]
    pub d: usize,
    /// Axis values, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    #[arg(long, value_delimiter = ',', default_value = "gpsr,ist,fista,palm,dalm")]
    pub algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Sweep CSV (default: sweep.csv); a summary JSON is written beside it
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Args)]
pub struct CabArgs {
    #[arg(long, default_value = "homotopy")]
    pub algo: Algorithm,
    #[arg(long, value_name = "FILE", requires = "rhs", conflicts_with_all = ["n", "d", "groups"])]
    pub matrix: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "matrix")]
    pub rhs: Option<PathBuf>,
    /// Rows of the generated bouquet dictionary
    #[arg(long, requires_all = ["n", "groups"])]
    pub d: Option<usize>,
    #[arg(long, requires_all = ["d", "groups"])]
    pub n: Option<usize>,
    #[arg(long, requires_all = ["d", "n"])]
    pub groups: Option<usize>,
    #[arg(long, default_value_t = 0.6)]
    pub coherence: f64,
    /// Fraction of generated measurements to corrupt
    #[arg(long, default_value_t = 0.0)]
    pub corruption: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Weight of ‖e‖₁ relative to ‖x‖₁
    #[arg(long, default_value_t = 1.0)]
    pub weight: f64,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AlignArgs {
    #[arg(long, default_value = "palm")]
    pub algo: AlignMethod,
    /// Tall basis CSV (d rows, m columns)
    #[arg(long, value_name = "FILE", requires = "rhs", conflicts_with_all = ["d", "m"])]
    pub basis: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "basis")]
    pub rhs: Option<PathBuf>,
    #[arg(long, requires = "m")]
    pub d: Option<usize>,
    #[arg(long, requires = "d")]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub corruption: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Metric {
    Error,
    Time,
    Iterations,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Summary JSON written by `phase` or `noise-sweep`
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
    /// Contour level for phase grids
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Plotted quantity for sweeps
    #[arg(long, value_enum, default_value = "error")]
    pub metric: Metric,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Gen(a) => commands::gen(a),
        Command::Phase(a) => commands::phase(a),
        Command::NoiseSweep(a) => commands::noise_sweep(a),
        Command::Cab(a) => commands::cab(a),
        Command::Align(a) => commands::align(a),
        Command::Report(a) => commands::report(a),
    };
    match outcome {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => {
            eprintln!("l1min: solver stopped before converging; results were written");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("l1min: {e}");
            ExitCode::from(e.code())
        }
    }
}
