//! `stch psl` and `stch front`: Pareto set learning runs over seeds, scored
//! by ΔHV against a cached reference front.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use stch::metrics::{delta_hv, DeltaHv, ParetoArchive};
use stch::problems::{Problem, ReferenceFront};
use stch::psl::{
    loss_history_csv, loss_spec, sample_front, test_preferences, train, Checkpoint, CheckpointHeader, OptimizerKind,
    TrainConfig, TrainOutcome, PSL_DEFAULT_MU, TEST_PREFERENCES,
};
use stch::{IdealPoint, ScalarizationKind};

use crate::args::{Budget, FrontArgs, PslArgs, TrainArgs};
use crate::config;
use crate::output::{create_dir, csv_text, join, num, write_csv, write_json, Header};
use crate::{CliError, CliResult};

/// Test preferences for three objectives are drawn from this seed so every
/// run is scored on the same set.
pub const TEST_PREFERENCE_SEED: u64 = 0;

/// Training settings shared by `psl` and `table`.
#[derive(Debug, Clone)]
pub struct TrainSettings {
    pub mu: f64,
    pub seeds: Vec<u64>,
    pub budget: Budget,
    pub iterations: usize,
    pub prefs_per_iter: usize,
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub resolution: usize,
    pub workers: usize,
    pub out: PathBuf,
    pub cache_dir: PathBuf,
}

impl TrainSettings {
    pub fn resolve(a: TrainArgs, default_out: &str) -> CliResult<Self> {
        let budget = a.budget.unwrap_or(Budget::Full);
        let n_seeds = config::at_least(a.seeds.unwrap_or(budget.seeds()), 1, "seeds")?;
        let first = a.seed.unwrap_or(0);
        let optimizer = OptimizerKind::from_id(a.optimizer.as_deref().unwrap_or("adam"))
            .map_err(|e| CliError::Config(e.to_string()))?;
        let out = config::out_dir(a.out, default_out);
        Ok(Self {
            mu: config::positive(a.mu.unwrap_or(PSL_DEFAULT_MU), "mu")?,
            seeds: (first..first + n_seeds as u64).collect(),
            budget,
            iterations: config::at_least(a.iterations.unwrap_or(budget.iterations()), 1, "iterations")?,
            prefs_per_iter: config::at_least(a.prefs_per_iter.unwrap_or(10), 1, "prefs_per_iter")?,
            optimizer,
            learning_rate: config::positive(a.learning_rate.unwrap_or(1e-3), "learning_rate")?,
            resolution: config::resolution(a.resolution)?,
            workers: a.workers.unwrap_or(0),
            cache_dir: a.cache_dir.unwrap_or_else(|| out.join("fronts")),
            out,
        })
    }

    pub fn train_config(&self, problem: &Problem, kind: ScalarizationKind, front: &ReferenceFront, seed: u64) -> CliResult<TrainConfig> {
        let spec = loss_spec(kind, front.normalization(), self.mu)?;
        let mut cfg = TrainConfig::new(spec, seed);
        cfg.iterations = self.iterations;
        cfg.prefs_per_iter = self.prefs_per_iter;
        cfg.optimizer = self.optimizer;
        cfg.learning_rate = self.learning_rate;
        cfg.validate().map_err(|e| CliError::Config(format!("{}: {e}", problem.name())))?;
        Ok(cfg)
    }

    /// Header entries describing the training budget.
    /// `m` is `None` for outputs that span problems with different `m`.
    pub fn describe(&self, header: Header, m: Option<usize>) -> Header {
        let z_star = match m {
            Some(m) => join(&IdealPoint::normalized_default(m).z_star),
            None => format!("{} per objective", IdealPoint::normalized_default(1).z_star[0]),
        };
        header
            .with("mu", self.mu)
            .with("z_star", z_star)
            .with("normalization", "reference_front_bounding_box")
            .with("seeds", seed_label(&self.seeds))
            .with("budget", self.budget.id())
            .with("iterations", self.iterations)
            .with("prefs_per_iter", self.prefs_per_iter)
            .with("optimizer", format!("{:?}", self.optimizer).to_lowercase())
            .with("learning_rate", self.learning_rate)
            .with("resolution", self.resolution)
            .with("test_preferences", TEST_PREFERENCES)
    }

    /// Runs `f` on a pool with the configured worker count.
    pub fn in_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> CliResult<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        Ok(pool.install(f))
    }
}

pub fn seed_label(seeds: &[u64]) -> String {
    match (seeds.first(), seeds.last()) {
        (Some(a), Some(b)) => format!("{a}..{b}"),
        _ => String::new(),
    }
}

/// One trained model and its score.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub outcome: TrainOutcome,
    pub archive: ParetoArchive,
    pub dhv: DeltaHv,
}

pub fn run_seed(problem: &Problem, kind: ScalarizationKind, front: &ReferenceFront, ts: &TrainSettings, seed: u64) -> CliResult<SeedRun> {
    let cfg = ts.train_config(problem, kind, front, seed)?;
    let outcome = train(problem, &cfg)?;
    let prefs = test_preferences(problem.m, TEST_PREFERENCES, TEST_PREFERENCE_SEED)?;
    let archive = sample_front(&outcome.model, problem, &prefs, front.reference_point.clone())?;
    let dhv = delta_hv(&archive, front)?;
    Ok(SeedRun { seed, outcome, archive, dhv })
}

/// Mean and sample standard deviation.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone)]
pub struct PslSettings {
    pub problem: Problem,
    pub kind: ScalarizationKind,
    pub train: TrainSettings,
}

impl PslSettings {
    pub fn resolve(args: PslArgs) -> CliResult<Self> {
        let file = config::load_psl(args.config.as_deref())?;
        let a = args.overlay(file);
        let problem = config::parse_problem(&config::require(a.problem, "problem")?, None)?;
        let kind = config::parse_kind(&config::require(a.method, "method")?)?;
        Ok(Self { problem, kind, train: TrainSettings::resolve(a.train, "out/psl")? })
    }
}

#[derive(Debug, Clone)]
pub struct PslReport {
    pub runs: Vec<SeedRun>,
    pub mean_dhv: f64,
    pub std_dhv: f64,
}

/// Trains one model per seed and writes, per seed, the checkpoint, loss
/// history and sampled front, plus a ΔHV report over all seeds.
pub fn run(s: &PslSettings) -> CliResult<PslReport> {
    let ts = &s.train;
    create_dir(&ts.out)?;
    create_dir(&ts.cache_dir)?;
    let front = ReferenceFront::load_or_compute(&s.problem, ts.resolution, &ts.cache_dir)?;
    let started = Instant::now();
    let runs: Vec<SeedRun> = ts.in_pool(|| {
        ts.seeds
            .par_iter()
            .map(|&seed| run_seed(&s.problem, s.kind, &front, ts, seed))
            .collect::<CliResult<_>>()
    })??;
    log::info!("psl {} {}: {} seeds in {:.3?}", s.problem.name(), s.kind, runs.len(), started.elapsed());

    let base = ts.describe(
        Header::new("psl").with("problem", s.problem.name()).with("method", s.kind.id()),
        Some(s.problem.m),
    );
    let stem = format!("{}_{}", s.problem.name(), s.kind.id());
    for r in &runs {
        let header = base.clone().with("seed", r.seed);
        let cfg = ts.train_config(&s.problem, s.kind, &front, r.seed)?;
        let checkpoint = Checkpoint { header: CheckpointHeader::new(&s.problem, &cfg), model: r.outcome.model.clone() };
        checkpoint.write_json(&ts.out.join(format!("{stem}_s{}_checkpoint.json", r.seed)))?;
        write_csv(
            &ts.out.join(format!("{stem}_s{}_loss.csv", r.seed)),
            &header,
            &loss_history_csv(&r.outcome.loss_history),
        )?;
        write_csv(&ts.out.join(format!("{stem}_s{}_front.csv", r.seed)), &header, &archive_csv(&r.archive, &s.problem)?)?;
    }

    let dhv: Vec<f64> = runs.iter().map(|r| r.dhv.delta).collect();
    let (mean_dhv, std_dhv) = mean_std(&dhv);
    let rows = runs.iter().map(|r| {
        vec![
            s.problem.name().to_string(),
            s.kind.id().to_string(),
            r.seed.to_string(),
            num(r.dhv.delta),
            r.dhv.dropped.to_string(),
        ]
    });
    let report = csv_text(&["problem", "method", "seed", "dhv", "dropped"], rows)?;
    write_csv(&ts.out.join(format!("{stem}_dhv.csv")), &base, &report)?;
    let summary = serde_json::json!({
        "config": base.to_json(),
        "n_seeds": runs.len(),
        "mean_dhv": mean_dhv,
        "std_dhv": std_dhv,
    });
    write_json(&ts.out.join(format!("{stem}_summary.json")), &summary)?;
    println!("{} {}: ΔHV = {mean_dhv:.4e} ± {std_dhv:.4e} over {} seeds", s.problem.name(), s.kind, runs.len());
    Ok(PslReport { runs, mean_dhv, std_dhv })
}

/// Archive as CSV with columns `x1…xn, f1…fm`.
pub fn archive_csv(archive: &ParetoArchive, problem: &Problem) -> CliResult<String> {
    let mut columns: Vec<String> = (1..=problem.n).map(|i| format!("x{i}")).collect();
    columns.extend((1..=problem.m).map(|i| format!("f{i}")));
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let rows = archive
        .entries()
        .into_iter()
        .map(|e| e.x.iter().chain(&e.f).map(|&v| num(v)).collect::<Vec<_>>());
    csv_text(&columns, rows)
}

#[derive(Debug, Clone)]
pub struct FrontSettings {
    pub problem: Problem,
    pub resolution: usize,
    pub out: PathBuf,
}

impl FrontSettings {
    pub fn resolve(args: FrontArgs) -> CliResult<Self> {
        let file = config::load(args.config.as_deref())?;
        let a = args.overlay(file);
        Ok(Self {
            problem: config::parse_problem(&config::require(a.problem, "problem")?, None)?,
            resolution: config::resolution(a.resolution)?,
            out: config::out_dir(a.out, "out/fronts"),
        })
    }
}

/// Writes the reference front in the cache format `psl` and `table` read.
pub fn run_front(s: &FrontSettings) -> CliResult<(PathBuf, ReferenceFront)> {
    create_dir(&s.out)?;
    let front = ReferenceFront::load_or_compute(&s.problem, s.resolution, &s.out)?;
    let path = ReferenceFront::cache_path(&s.out, &s.problem, s.resolution);
    println!("{}: {} points, reference point {:?} -> {}", s.problem.name(), front.points.len(), front.reference_point, display(&path));
    Ok((path, front))
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
