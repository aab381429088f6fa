use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

/// Comparative statics of the three-factor, two-good trade model.
#[derive(Debug, Parser)]
#[command(name = "ews", version, about, propagate_version = true)]
pub struct Cli {
    /// Override the numerical tolerance used by the command (must be positive).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Seed for commands that sample economies (required by `sweep`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Accept negative relative price changes by reversing time.
    #[arg(long, global = true)]
    pub time_reversal: bool,

    /// Directory for written artifacts (CSV, SVG, summaries).
    #[arg(long, global = true, env = "EWS_OUT_DIR", default_value = ".")]
    pub out: PathBuf,

    /// Output format for the report printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NestChoice {
    /// Land and capital nested together in both sectors.
    LandCapital,
    /// Each sector nests a random factor pair.
    Any,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural invariants of an economy file.
    Validate {
        economy: PathBuf,
        /// Skip the factor-intensity ranking checks.
        #[arg(long)]
        no_ranking: bool,
    },
    /// Print the economy-wide substitution matrix and its identities.
    Ews { economy: PathBuf },
    /// Locate the ratio vector and classify its quadrant and subregion.
    Classify { economy: PathBuf },
    /// Solve the linearized system for a shock.
    Solve { economy: PathBuf, shock: PathBuf },
    /// Output responses to endowment changes, from an economy or a technology file.
    Rybczynski {
        /// Economy snapshot (JSON).
        #[arg(required_unless_present = "technology", conflicts_with = "technology")]
        economy: Option<PathBuf>,
        /// Technology file; the equilibrium is solved and finite differences are compared.
        #[arg(long)]
        technology: Option<PathBuf>,
        /// Relative step for the finite-difference comparison.
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Run the estimation pipeline on observed rates of change.
    Estimate {
        /// Observation file: JSON (object or array) or CSV.
        input: PathBuf,
        /// JSON object mapping canonical column names to CSV headers.
        #[arg(long)]
        columns: Option<PathBuf>,
        /// Also write an SVG of the segment for each observation.
        #[arg(long)]
        plot: bool,
    },
    /// Sample, solve and cross-check many economies.
    Sweep {
        #[arg(long)]
        count: usize,
        /// Only keep economies whose ratio point lies in quadrant IV.
        #[arg(long)]
        quadrant_iv: bool,
        #[arg(long, value_enum, default_value_t = NestChoice::LandCapital)]
        nest: NestChoice,
        /// Compare signs against finite differences of the nonlinear model.
        #[arg(long)]
        fd_oracle: bool,
        /// Shock file for the ranking and segment checks (default: P = 1).
        #[arg(long)]
        shock: Option<PathBuf>,
        /// Base name of the CSV and summary files.
        #[arg(long, default_value = "sweep")]
        name: String,
    },
    /// Draw the ratio plane for an economy or an estimate report.
    Plot {
        /// Economy JSON or an estimate report JSON.
        input: PathBuf,
        /// Shock used for the vector line when plotting an economy (default: P = 1).
        #[arg(long)]
        shock: Option<PathBuf>,
        /// Base name of the SVG and CSV files.
        #[arg(long, default_value = "plot")]
        name: String,
    },
}

/// Why a command failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Model error or failed assertion (exit 1).
    Model(String),
    /// Unreadable or malformed input, or a bad argument (exit 2).
    Input(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Model(m) | Failure::Input(m) => f.write_str(m),
        }
    }
}

impl From<ews_core::Error> for Failure {
    fn from(e: ews_core::Error) -> Self {
        Failure::Model(e.to_string())
    }
}

impl From<ews_core::io::LoadError> for Failure {
    fn from(e: ews_core::io::LoadError) -> Self {
        Failure::Input(e.to_string())
    }
}

/// What a successful run produced: text for stdout, and whether every check passed.
pub struct Outcome {
    pub stdout: String,
    pub passed: bool,
}

pub fn out_path(cli: &Cli, file: &str) -> PathBuf {
    cli.out.join(file)
}

fn check_tolerance(t: Option<f64>) -> Result<(), Failure> {
    match t {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(Failure::Input(format!("--tolerance must be positive, got {t}"))),
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    check_tolerance(cli.tolerance)?;
    match &cli.command {
        Command::Validate { economy, no_ranking } => commands::validate(cli, economy, !no_ranking),
        Command::Ews { economy } => commands::ews(cli, economy),
        Command::Classify { economy } => commands::classify(cli, economy),
        Command::Solve { economy, shock } => commands::solve(cli, economy, shock),
        Command::Rybczynski { economy, technology, step } => {
            commands::rybczynski(cli, economy.as_deref(), technology.as_deref(), *step)
        }
        Command::Estimate { input, columns, plot } => commands::estimate(cli, input, columns.as_deref(), *plot),
        Command::Sweep { count, quadrant_iv, nest, fd_oracle, shock, name } => {
            commands::sweep(cli, *count, *quadrant_iv, *nest, *fd_oracle, shock.as_deref(), name)
        }
        Command::Plot { input, shock, name } => commands::plot(cli, input, shock.as_deref(), name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Model(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

pub fn display(p: &Path) -> String {
    p.display().to_string()
}
