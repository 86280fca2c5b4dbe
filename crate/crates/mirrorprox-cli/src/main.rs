//! Command-line harness around the mirror-prox solver library: generate
//! game instances, run solvers into CSV traces, certify dual gaps, check
//! the per-step inequality suite, and render convergence plots.

mod commands;
mod svg;
mod trace;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mirrorprox::{Error, Gamma, Method, MirrorKind};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mirrorprox",
    version,
    about = "Mirror-prox solvers for monotone VIs on products of simplices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a monotone matrix-game instance file
    Generate(GenerateArgs),
    /// Run a solver and write a convergence trace CSV
    Solve(SolveArgs),
    /// Run with diagnostics and report the per-step inequality suite
    Verify(VerifyArgs),
    /// Estimate the dual gap of a point with both estimators
    Gap(GapArgs),
    /// Render trace CSVs as an SVG convergence plot
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Popov,
    Korpelevich,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Popov => Method::Popov,
            MethodArg::Korpelevich => Method::Korpelevich,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MirrorArg {
    Entropic,
    Euclidean,
}

impl From<MirrorArg> for MirrorKind {
    fn from(m: MirrorArg) -> MirrorKind {
        match m {
            MirrorArg::Entropic => MirrorKind::Entropic,
            MirrorArg::Euclidean => MirrorKind::Euclidean,
        }
    }
}

/// Where the problem instance comes from: a `.vigame` file, the built-in
/// matching-pennies game, or in-memory generation.
#[derive(Args)]
struct ProblemArgs {
    /// Problem file (.vigame)
    #[arg(long, value_name = "FILE")]
    problem: Option<PathBuf>,
    /// Use the built-in matching-pennies game
    #[arg(long, conflicts_with = "problem")]
    pennies: bool,
    /// Generate an instance in memory with this seed
    #[arg(long, value_name = "SEED", conflicts_with_all = ["problem", "pennies"])]
    gen_seed: Option<u64>,
    /// Eigenvalue range of the symmetric part for --gen-seed
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 100.0])]
    eig: Vec<f64>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator seed
    #[arg(long, env = "MIRRORPROX_SEED", default_value_t = 0)]
    seed: u64,
    /// Eigenvalue range of the symmetric part of the mapping matrix
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 100.0])]
    eig: Vec<f64>,
    /// Output path (.vigame)
    #[arg(short, long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "popov")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "entropic")]
    mirror: MirrorArg,
    /// Step size: "auto" (the method's prescribed value) or a positive float
    #[arg(long, default_value = "auto")]
    gamma: String,
    /// Number of iterations
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// Estimate the gap every this many iterations
    #[arg(long, default_value_t = 10)]
    gap_every: usize,
    /// Sample count for the sampling gap estimator
    #[arg(long, default_value_t = 200_000)]
    gap_samples: usize,
    /// Mesh for the grid gap oracle (2x2 problems only)
    #[arg(long, default_value_t = 1e-3)]
    gap_grid_step: f64,
    /// Seed for gap sampling
    #[arg(long, env = "MIRRORPROX_SEED", default_value_t = 42)]
    seed: u64,
    /// Start point x0 as comma-separated coordinates (default: uniform)
    #[arg(long, value_name = "COORDS")]
    x0: Option<String>,
    /// Start point y0 as comma-separated coordinates (default: x0)
    #[arg(long, value_name = "COORDS")]
    y0: Option<String>,
    /// Abort with exit code 3 if any per-step inequality fails
    #[arg(long)]
    strict: bool,
    /// Output trace path
    #[arg(short, long, value_name = "FILE", default_value = "trace.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Method to check (default: both)
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Mirror map to check (default: both)
    #[arg(long, value_enum)]
    mirror: Option<MirrorArg>,
    /// Step size: "auto" or a positive float
    #[arg(long, default_value = "auto")]
    gamma: String,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 50_000)]
    gap_samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    gap_grid_step: f64,
    #[arg(long, env = "MIRRORPROX_SEED", default_value_t = 42)]
    seed: u64,
    /// Start point x0 (default: uniform)
    #[arg(long, value_name = "COORDS")]
    x0: Option<String>,
    /// Start point y0 (default: a tilted point distinct from x0)
    #[arg(long, value_name = "COORDS")]
    y0: Option<String>,
}

#[derive(Args)]
struct GapArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Point to certify, comma-separated (default: uniform)
    #[arg(long, value_name = "COORDS")]
    at: Option<String>,
    #[arg(long, default_value_t = 200_000)]
    gap_samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    gap_grid_step: f64,
    #[arg(long, env = "MIRRORPROX_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct PlotArgs {
    /// Trace CSVs produced by `solve`
    #[arg(value_name = "TRACE", required = true, num_args = 1..)]
    traces: Vec<PathBuf>,
    /// Output SVG path (a merged-data CSV is written beside it)
    #[arg(short, long, value_name = "FILE", default_value = "plot.svg")]
    out: PathBuf,
}

fn parse_gamma(text: &str) -> Result<Gamma, Error> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(Gamma::Auto);
    }
    let g: f64 = text.parse().map_err(|_| {
        Error::Contract(format!("--gamma must be \"auto\" or a float, got {text:?}"))
    })?;
    Ok(Gamma::Fixed(g))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Contract(_) | Error::Parse(_) | Error::DimensionMismatch { .. } => 2,
        Error::Validation(_)
        | Error::Domain(_)
        | Error::Degenerate(_)
        | Error::Diagnostics { .. } => 3,
        Error::Io { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Solve(args) => commands::solve(args),
        Command::Verify(args) => commands::verify(args),
        Command::Gap(args) => commands::gap(args),
        Command::Plot(args) => commands::plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
