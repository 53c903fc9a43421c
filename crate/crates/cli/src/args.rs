//! Command-line flags. Each subcommand also accepts `--config FILE`, a JSON
//! object whose keys are the flag names in snake_case; flags given on the
//! command line take precedence over the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "stch", version, about = "Smooth Tchebycheff multi-objective optimization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize one preference with a scalarization or MGDA.
    Solve(SolveArgs),
    /// TCH vs STCH gap-to-optimum curves on the toy problem.
    Race(RaceArgs),
    /// Train Pareto set models and report ΔHV over seeds.
    Psl(PslArgs),
    /// ΔHV table over problems and methods, cached per cell.
    Table(TableArgs),
    /// Compute (or load) a reference front and write it as CSV.
    Front(FrontArgs),
}

/// Reduced (`desk`) or full experiment budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Desk,
    Full,
}

impl Budget {
    pub fn id(self) -> &'static str {
        match self {
            Budget::Desk => "desk",
            Budget::Full => "full",
        }
    }

    /// Training iterations per run.
    pub fn iterations(self) -> usize {
        match self {
            Budget::Desk => 500,
            Budget::Full => 2000,
        }
    }

    pub fn seeds(self) -> usize {
        match self {
            Budget::Desk => 10,
            Budget::Full => 30,
        }
    }
}

/// Fills every unset field of `$flags` from `$file`.
macro_rules! overlay {
    ($flags:ident, $file:ident; $($field:ident),* $(,)?) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field; } )*
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveArgs {
    /// JSON config file.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    /// ls, tch, stch or mgda.
    #[arg(long)]
    pub method: Option<String>,
    /// Preference vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub iters: Option<usize>,
    /// Step size (η for ls/stch/mgda, η₀ of η₀/√t for tch).
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub record_every: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decision dimension for F1–F6.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Reference front resolution (used for objective normalization).
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

impl SolveArgs {
    pub fn overlay(mut self, file: SolveArgs) -> Self {
        overlay!(self, file; problem, method, lambda, mu, iters, step, tolerance, record_every, seed, dim,
            resolution, out, cache_dir);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RaceArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Iterations per trial; evaluation counts run from 1 to iters + 1.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// Constant STCH step size.
    #[arg(long)]
    pub stch_step: Option<f64>,
    /// η₀ of the TCH η₀/√t schedule.
    #[arg(long)]
    pub tch_step: Option<f64>,
    /// Seed of the first trial; trial k uses seed + k.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RaceArgs {
    pub fn overlay(mut self, file: RaceArgs) -> Self {
        overlay!(self, file; trials, iters, mu, lambda, stch_step, tch_step, seed, out);
        self
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainArgs {
    /// Smoothing parameter of the STCH loss.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Number of seeds.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// First seed; runs use seed, seed + 1, ...
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub budget: Option<Budget>,
    /// Training iterations (overrides the budget).
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub prefs_per_iter: Option<usize>,
    /// adam or sgd.
    #[arg(long)]
    pub optimizer: Option<String>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Reference front resolution.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reference front cache (default: <out>/fronts).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

impl TrainArgs {
    pub fn overlay(mut self, file: TrainArgs) -> Self {
        overlay!(self, file; mu, seeds, seed, budget, iterations, prefs_per_iter, optimizer, learning_rate,
            resolution, workers, out, cache_dir);
        self
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct PslArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    /// ls, tch or stch.
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Problems (default: all eleven).
    #[arg(long, value_delimiter = ',')]
    pub problems: Option<Vec<String>>,
    /// Methods (default: ls,tch,stch).
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrontArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl PslArgs {
    pub fn overlay(mut self, file: PslArgs) -> Self {
        overlay!(self, file; problem, method);
        self.train = self.train.overlay(file.train);
        self
    }
}

impl TableArgs {
    pub fn overlay(mut self, file: TableArgs) -> Self {
        overlay!(self, file; problems, methods);
        self.train = self.train.overlay(file.train);
        self
    }
}

impl FrontArgs {
    pub fn overlay(mut self, file: FrontArgs) -> Self {
        overlay!(self, file; problem, resolution, out);
        self
    }
}
