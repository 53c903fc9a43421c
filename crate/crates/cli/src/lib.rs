//! Experiment runner for the stch toolkit: single solves, the TCH/STCH
//! convergence race, Pareto set learning runs and the ΔHV benchmark table.
//!
//! Every command writes plain CSV/JSON files that start with a `# key=value`
//! block recording the configuration that produced them. Outputs are
//! deterministic given the configuration; timing goes to the log only.

pub mod args;
pub mod config;
pub mod output;
pub mod psl;
pub mod race;
pub mod solve;
pub mod table;

use thiserror::Error;

pub use args::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<stch::Error> for CliError {
    fn from(e: stch::Error) -> Self {
        match e {
            stch::Error::Divergence { .. } | stch::Error::NonFinite(_) => CliError::Numerical(e.to_string()),
            stch::Error::Io(_) | stch::Error::Parse(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(a) => solve::run(&solve::SolveSettings::resolve(a)?).map(|_| ()),
        Command::Race(a) => race::run(&race::RaceSettings::resolve(a)?).map(|_| ()),
        Command::Psl(a) => psl::run(&psl::PslSettings::resolve(a)?).map(|_| ()),
        Command::Table(a) => table::run(&table::TableSettings::resolve(a)?).map(|_| ()),
        Command::Front(a) => psl::run_front(&psl::FrontSettings::resolve(a)?).map(|_| ()),
    }
}
