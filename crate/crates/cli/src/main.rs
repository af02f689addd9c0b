mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use padic_wavelet::padic::is_prime;
use padic_wavelet::{Convention, Window};

/// Wavelet analysis on the p-adic line.
#[derive(Debug, Parser)]
#[command(name = "padic-wavelet", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// The prime p [default: 2, or the prime of the input file].
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// p-adic digits kept when a point is given as a rational.
    #[arg(long, global = true, default_value_t = 20)]
    precision: usize,
    /// Scale window NMIN:NMAX[:DEPTH].
    #[arg(long, global = true, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Window>,
    /// Residual tolerance in floating mode.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tolerance: f64,
    /// Normalization of the real Haar wavelets.
    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Orthonormal)]
    convention: ConventionArg,
    /// Largest number of cells any table may have.
    #[arg(long, global = true, default_value_t = padic_wavelet::function_space::DEFAULT_CELL_CAP)]
    cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exact phase arithmetic or floating point.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Orthonormal,
    Scaled,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wavelet tables and point values.
    #[command(subcommand)]
    Wavelet(WaveletCommand),
    /// Wavelet coefficients of a table function.
    Analyze {
        /// Function file (JSON).
        #[arg(long)]
        input: PathBuf,
    },
    /// Table function from wavelet coefficients.
    Synthesize {
        /// Expansion file (JSON).
        #[arg(long)]
        input: PathBuf,
        /// Resolution exponent of the output; default 1 − n_min.
        #[arg(long, allow_hyphen_values = true)]
        resolution: Option<i64>,
    },
    /// Fourier transform of a table function.
    Fourier {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
    /// Operator-algebra checks.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Haar coefficients of x^d on [0, 1].
    ExpandMonomial {
        #[arg(long)]
        degree: u32,
        /// Levels 0 .. LEVELS − 1.
        #[arg(long, default_value_t = 3)]
        levels: i64,
    },
    /// Real Haar wavelets.
    #[command(subcommand)]
    Haar(HaarCommand),
    /// The Monna map on a point, or the pushforward of a wavelet.
    MonnaMap {
        #[arg(long, conflicts_with = "point", required_unless_present = "point", allow_hyphen_values = true)]
        index: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum WaveletCommand {
    /// Per-cell values of wavelets.
    Table {
        /// Index N:M:J with M's digits separated by dots, e.g. -1:2.1:1 or 0::1.
        #[arg(long, allow_hyphen_values = true)]
        index: Vec<String>,
        /// Every index in the window.
        #[arg(long, conflicts_with = "index")]
        all: bool,
    },
    /// Value of one wavelet at one point.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        index: String,
        /// p-adic text (`p^v * (d0 + ...) ~ O(p^a)`) or a rational a/b.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCommand {
    /// Run a relation family on every interior basis vector of the window.
    Algebra {
        #[arg(long, value_enum, default_value_t = Relation::Sl2)]
        relation: Relation,
        /// Order of D^α (deformed, semigroup, translation).
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        alpha: String,
        /// Second order for the semigroup law.
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        beta: String,
        /// Witt indices range over [−RANGE, RANGE].
        #[arg(long, default_value_t = 3)]
        range: i64,
        /// Adds a spurious identity term to every relation.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Relation {
    Sl2,
    Witt,
    Deformed,
    Semigroup,
    Translation,
}

#[derive(Debug, Subcommand)]
enum HaarCommand {
    /// Samples Ψ_{L,t} at the midpoints of N equal subintervals.
    Sample {
        #[arg(long)]
        level: i64,
        #[arg(long, default_value_t = 0)]
        translate: u64,
        #[arg(long, default_value_t = 16)]
        points: u64,
    },
}

fn parse_window(s: &str) -> Result<Window, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err("expected NMIN:NMAX[:DEPTH]".into());
    }
    let n_min = parts[0].trim().parse::<i64>().map_err(|e| format!("NMIN: {e}"))?;
    let n_max = parts[1].trim().parse::<i64>().map_err(|e| format!("NMAX: {e}"))?;
    let depth = match parts.get(2) {
        Some(d) => d.trim().parse::<u32>().map_err(|e| format!("DEPTH: {e}"))?,
        None => 1,
    };
    Window::new(n_min, n_max, depth).map_err(|e| e.to_string())
}

/// Failure classes, one per nonzero exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Cap(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Cap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Cap(m) => m,
        }
    }
}

impl From<padic_wavelet::Error> for CliError {
    fn from(e: padic_wavelet::Error) -> Self {
        use padic_wavelet::Error::*;
        match e {
            CapExceeded { .. } => CliError::Cap(e.to_string()),
            Parse(_) | InvalidInput(_) | PrimeMismatch { .. } => CliError::Usage(e.to_string()),
            Inexact(_) => CliError::Usage(format!("{e} (try --mode float)")),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub struct RunConfig {
    pub prime: u64,
    pub prime_given: bool,
    pub precision: usize,
    pub window: Option<Window>,
    pub tolerance: f64,
    pub convention: Convention,
    pub format: Format,
    pub seed: u64,
    pub mode: Mode,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(g: GlobalArgs) -> Result<Self, CliError> {
        let prime = g.prime.unwrap_or(2);
        if !is_prime(prime) {
            return Err(CliError::Usage(format!("--prime {prime} is not prime")));
        }
        if g.tolerance.is_nan() || g.tolerance <= 0.0 {
            return Err(CliError::Usage("--tolerance must be positive".into()));
        }
        if g.cap < 1 {
            return Err(CliError::Usage("--cap must be at least 1".into()));
        }
        if g.precision < 1 {
            return Err(CliError::Usage("--precision must be at least 1".into()));
        }
        padic_wavelet::function_space::set_cell_cap(g.cap);
        Ok(RunConfig {
            prime,
            prime_given: g.prime.is_some(),
            precision: g.precision,
            window: g.window,
            tolerance: g.tolerance,
            convention: match g.convention {
                ConventionArg::Orthonormal => Convention::Orthonormal,
                ConventionArg::Scaled => Convention::Scaled,
            },
            format: g.format,
            seed: g.seed,
            mode: g.mode,
            output: g.output,
        })
    }

    /// Input files carry their own prime; an explicit `--prime` must agree.
    pub fn check_file_prime(&self, file_prime: u64) -> Result<(), CliError> {
        if self.prime_given && file_prime != self.prime {
            return Err(CliError::Usage(format!("input is {file_prime}-adic but --prime is {}", self.prime)));
        }
        Ok(())
    }

    /// Residual tolerance: zero in exact mode.
    pub fn tol(&self) -> f64 {
        match self.mode {
            Mode::Exact => 0.0,
            Mode::Float => self.tolerance,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::from_args(cli.global)?;
    match cfg.mode {
        Mode::Exact => commands::dispatch::<padic_wavelet::Cyclotomic>(&cfg, cli.command),
        Mode::Float => commands::dispatch::<num_complex::Complex64>(&cfg, cli.command),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
