//! `epibvp`: solve, scan and check the radial epitaxy boundary value
//! problems from the command line.
//!
//! Exit status: 0 ok, 1 bad configuration or input, 2 no real slope
//! constant, 3 solutions still exist at the end of a scan bracket.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use epibvp::{Error, ProblemKind};

#[derive(Parser, Debug)]
#[command(name = "epibvp", version, about, args_override_self = true)]
struct Cli {
    /// Flat `key = value` file; keys are long flag names.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory. Also set by EPIBVP_OUT.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Branches at one lambda, written per branch and per engine.
    Solve(SolveArgs),
    /// Bisect for the critical lambda.
    Scan(ScanArgs),
    /// Branch count and slope constants over a list of lambdas.
    ExistenceProfile(ProfileArgs),
    /// Monotone iteration with its full step trace.
    Monotone(MonotoneArgs),
    /// Sign checks of the shifted Green's function over a range of k.
    GreensCheck(GreensArgs),
    /// Residuals at r = 0, 0.1, ..., 0.9 for every branch.
    ResidualTable(TableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Adm,
    Monotone,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct SeriesArgs {
    /// Correction terms in the decomposition.
    #[arg(long, default_value_t = 15)]
    pub n_terms: usize,
    /// Lower end of the scan for the slope constant c.
    #[arg(long, default_value_t = -60.0, allow_negative_numbers = true)]
    pub c_min: f64,
    #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
    pub c_max: f64,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = Engine::Adm)]
    pub engine: Engine,
    /// Shift of the monotone scheme.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    /// Width of the final bracket.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda_min: f64,
    /// Defaults to the proven upper bound plus 10.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda_max: Option<f64>,
    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    /// `start:step:stop` or a comma separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub lambdas: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Args, Debug)]
pub struct MonotoneArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct GreensArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    /// One value or an inclusive range `a..b`.
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    /// Number of k values taken from a range.
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    /// Grid points per side of the sign check.
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    /// A number, or `critical` for the last lambda with two branches.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, default_value_t = epibvp::adm::TABLE_TERMS)]
    pub n_terms: usize,
    #[arg(long, default_value_t = -60.0, allow_negative_numbers = true)]
    pub c_min: f64,
    #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
    pub c_max: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn parse_problem(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What went wrong, and which exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    Engine(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Usage(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Engine(Error::NoRealRoot { .. }) => 2,
            Failure::Engine(Error::BracketFailure { .. }) => 3,
            _ => 1,
        }
    }
}

fn out_dir(cli: Option<PathBuf>, file: Option<&String>) -> PathBuf {
    cli.or_else(|| std::env::var_os("EPIBVP_OUT").filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| file.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run() -> Result<(), Failure> {
    let mut args: Vec<String> = std::env::args().collect();
    let mut file_values = Default::default();
    if let Some(path) = config::config_path(&args) {
        file_values = config::read(path.as_ref())?;
        args = config::splice(args, &file_values, &Cli::command())?;
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            if usage {
                return Err(Failure::Usage(String::new()));
            }
            return Ok(());
        }
    };
    let dir = out_dir(cli.out, file_values.get("out"));
    let mut sink = output::Sink::new(&dir)?;
    let result = match cli.cmd {
        Cmd::Solve(a) => commands::solve(&a, &mut sink),
        Cmd::Scan(a) => commands::scan(&a, &mut sink),
        Cmd::ExistenceProfile(a) => commands::existence_profile(&a, &mut sink),
        Cmd::Monotone(a) => commands::monotone(&a, &mut sink),
        Cmd::GreensCheck(a) => commands::greens_check(&a, &mut sink),
        Cmd::ResidualTable(a) => commands::residual_table(&a, &mut sink),
    };
    for path in sink.written() {
        eprintln!("wrote {}", path.display());
    }
    result
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Engine(e) => eprintln!("error: {e}"),
                Failure::Usage(m) if !m.is_empty() => eprintln!("error: {m}"),
                Failure::Usage(_) => {}
            }
            ExitCode::from(f.code())
        }
    }
}
