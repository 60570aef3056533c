//! `chronon`: batch front end for the chronon-core library.
//!
//! Exit status is 0 when everything ran and passed, 1 for a numerical
//! failure, 2 for usage, config or I/O errors.

mod compare;
mod config;
mod identities;
mod output;
mod run;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Bad arguments, config or output location. Nothing is written.
    #[error("{0}")]
    Usage(String),
    /// The computation ran but failed a check or stopped early.
    #[error("{0}")]
    Numeric(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Numeric(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "chronon", version, about = "Discrete-time electron dynamics: runs, identity checks, ALD comparison, sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one scenario; writes trajectory CSV and JSON plus a report.
    Run(ScenarioArgs),
    /// Evaluate the series identities and closed-form checks.
    CheckIdentities(IdentityArgs),
    /// Run a pulse (or free particle) through the chronon and ALD integrators.
    Compare(ScenarioArgs),
    /// Run every point of the config's `[sweep]` grid; one CSV row per point.
    Sweep(ScenarioArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    /// TOML scenario file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `[output] directory`; default `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = ["retarded", "advanced", "symmetric"])]
    pub formulation: Option<String>,
    #[arg(long, value_parser = ["literal", "trapezoidal"])]
    pub transmission: Option<String>,
    /// Unit system for the reported physical constants.
    #[arg(long, value_parser = ["natural", "si", "gaussian"])]
    pub units: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct IdentityArgs {
    /// Largest mode index; precision is certified up to 8.
    #[arg(long = "max-m", default_value_t = 8)]
    pub max_m: u32,
    /// Series truncation.
    #[arg(long, default_value_t = 300)]
    pub ntrunc: usize,
    /// Also write `identities.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CHRONON_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run::execute(args),
        Command::CheckIdentities(args) => identities::execute(args),
        Command::Compare(args) => compare::execute(args),
        Command::Sweep(args) => sweep::execute(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
