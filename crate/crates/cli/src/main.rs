//! `paramarkov`: simulate trajectories, tabulate pmfs and transition
//! matrices, and run the verification suites.
//!
//! Exit codes: 0 success, 2 validation or parse error, 3 verification
//! failure, 4 accuracy error.

mod commands;
mod error;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use paramarkov::chains::Process;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "paramarkov", version, about = "Para-Markov chains and the exchangeable fractional Poisson process")]
struct Cli {
    /// Base seed; replica i uses stream i of this seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate trajectories of a chain or of the efPp.
    Simulate(SimulateArgs),
    /// Analytic pmf of N_t with an optional Monte Carlo column.
    Pmf(PmfArgs),
    /// Transition matrices of a generator.
    Matrix(MatrixArgs),
    /// Run the residual and invariant suites.
    Verify(VerifyArgs),
    /// Reproduce the pmf grid and sample trajectories in one bundle.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessArg {
    Markov,
    Semi,
    Para,
    Efpp,
}

impl From<ProcessArg> for Process {
    fn from(p: ProcessArg) -> Self {
        match p {
            ProcessArg::Markov => Process::Markov,
            ProcessArg::Semi => Process::Semi,
            ProcessArg::Para => Process::Para,
            ProcessArg::Efpp => Process::Efpp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Markov,
    Semi,
    Para,
}

/// Generators shipped with the tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bundled {
    /// Two states, rates 1 and 2.
    TwoState,
    /// Three states, rates 1, 2, 1.5.
    ThreeState,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("stop").required(true).args(["events", "horizon"])))]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "efpp")]
    pub process: ProcessArg,
    /// Fractional order in (0, 1]; overrides the value in --spec.
    #[arg(long)]
    pub nu: Option<f64>,
    /// efPp intensity.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// JSON chain description with `states`, `H`, `rates`, `nu`.
    #[arg(long, conflicts_with = "bundled")]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "two-state")]
    pub bundled: Bundled,
    /// Initial state index.
    #[arg(long, default_value_t = 0)]
    pub y0: usize,
    /// Number of jumps to simulate.
    #[arg(long)]
    pub events: Option<usize>,
    /// Time horizon.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub replicas: u64,
    /// Output file; with several replicas `_<i>` is inserted before the extension.
    #[arg(long, short, default_value = "trajectory.csv")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Also write an SVG step plot next to each data file.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[arg(long)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 9)]
    pub nmax: usize,
    /// Monte Carlo replicas; 0 skips the simulated column.
    #[arg(long, default_value_t = 1_000_000)]
    pub mc_replicas: u64,
    #[arg(long, short, default_value = "pmf.csv")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Generator as a CSV matrix or a JSON chain description.
    #[arg(long, conflicts_with = "bundled")]
    pub generator: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "two-state")]
    pub bundled: Bundled,
    #[arg(long, default_value_t = 0.5)]
    pub nu: f64,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub t: Vec<f64>,
    #[arg(long, value_enum, default_value = "para")]
    pub mode: ModeArg,
    /// Also write the fractional generator −(−G)^ν.
    #[arg(long)]
    pub frac_generator: bool,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Verify this generator instead of the bundled ones.
    #[arg(long)]
    pub generator: Option<PathBuf>,
    /// Comma-separated fractional orders.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.9,1")]
    pub nu: Vec<f64>,
    /// Grid step of the residual checks.
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    #[arg(long, default_value_t = 0.1)]
    pub t_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    /// JSON report path.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, default_value = "report")]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub replicas: u64,
    /// Jumps per sample trajectory.
    #[arg(long, default_value_t = 10_000)]
    pub events: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,5")]
    pub t: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,0.9")]
    pub nu: Vec<f64>,
    #[arg(long, default_value_t = 9)]
    pub nmax: usize,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a, cli.seed),
        Command::Pmf(a) => commands::pmf(&a, cli.seed),
        Command::Matrix(a) => commands::matrix(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Report(a) => commands::report(&a, cli.seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
