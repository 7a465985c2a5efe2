//! Command-line front end.
//!
//! Three verbs: `design-calc` tabulates sample sizes and the decision ratio
//! over a correlation grid, `select` runs the blinded interim decision on
//! observed counts, and `simulate` runs a Monte Carlo sweep into a CSV file
//! with a resumable manifest.
//!
//! Exit codes: 0 success, 2 configuration error, 3 domain error (for
//! example no treatment effect), 4 runtime failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

pub mod config;
mod design_calc;
pub mod manifest;
pub mod plot;
mod select;
mod simulate;

/// Seed used when neither the config nor `--seed` gives one.
pub const DEFAULT_SEED: u64 = 20_231_014;

#[derive(Debug, Parser)]
#[command(name = "endpoint-select", version, about = "Blinded adaptive selection of the primary endpoint")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample sizes and decision ratio over a correlation grid.
    DesignCalc(DesignCalcArgs),
    /// Endpoint selection and reassessment from blinded interim counts.
    Select(SelectArgs),
    /// Monte Carlo power and type I error sweep.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct DesignCalcArgs {
    /// TOML file with `[design]`, `[relevant]`, `[additional]` and `rho`.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for plot data (long CSV and SVG).
    #[arg(long)]
    pub plots: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// TOML file with design, endpoints, `[blinded]` counts and `[plan]`.
    #[arg(long)]
    pub config: PathBuf,
    /// JSON destination; printed after the table when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML file with `[design]` and `[grid]`.
    #[arg(long, required_unless_present = "paper_grid", conflicts_with = "paper_grid")]
    pub config: Option<PathBuf>,
    /// Use the built-in reference grid instead of a config file.
    #[arg(long)]
    pub paper_grid: bool,
    /// Results CSV; the manifest is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Base seed; overrides the config value.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replications per scenario.
    #[arg(long)]
    pub reps: Option<u64>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory for power-vs-correlation plot data.
    #[arg(long)]
    pub plots: Option<PathBuf>,
}

/// Failure of a CLI run, carrying its exit code class.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(Error),
    #[error("runtime failure: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => CliError::Config(msg),
            other => CliError::Domain(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::DesignCalc(args) => design_calc::run(&args),
        Command::Select(args) => select::run(&args),
        Command::Simulate(args) => simulate::run(&args),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Writes `contents` to `path`, creating nothing but the file itself.
fn write_file(path: &std::path::Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(path: &std::path::Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))
}
