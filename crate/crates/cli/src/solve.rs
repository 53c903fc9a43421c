//! `stch solve`: one preference, one optimizer.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use stch::problems::{Problem, ReferenceFront};
use stch::psl::loss_spec;
use stch::scalarize::DEFAULT_MU;
use stch::solvers::{default_schedule, solve_mgda, solve_scalarized, SolveConfig, StepSchedule, StopReason};
use stch::{IdealPoint, Preference};

use crate::args::SolveArgs;
use crate::config::{self, Method};
use crate::output::{create_dir, join, write_csv, write_json, Header};
use crate::{CliError, CliResult};

pub const DEFAULT_STEP: f64 = 0.05;
pub const DEFAULT_ITERS: usize = 1000;

#[derive(Debug, Clone)]
pub struct SolveSettings {
    pub problem: Problem,
    pub method: Method,
    pub lambda: Preference,
    pub mu: f64,
    pub solver: SolveConfig,
    pub resolution: usize,
    pub out: PathBuf,
    pub cache_dir: PathBuf,
}

impl SolveSettings {
    pub fn resolve(args: SolveArgs) -> CliResult<Self> {
        let file = config::load(args.config.as_deref())?;
        let a = args.overlay(file);
        let problem = config::parse_problem(&config::require(a.problem, "problem")?, a.dim)?;
        let method = Method::parse(&config::require(a.method, "method")?)?;
        let lambda = match a.lambda {
            Some(v) if v.len() != problem.m => {
                return Err(CliError::Config(format!(
                    "lambda has {} entries, {} has {} objectives",
                    v.len(),
                    problem.name(),
                    problem.m
                )))
            }
            Some(v) => Preference::new(v).map_err(|e| CliError::Config(e.to_string()))?,
            None => Preference::uniform(problem.m),
        };
        let mu = config::positive(a.mu.unwrap_or(DEFAULT_MU), "mu")?;
        let step = config::positive(a.step.unwrap_or(DEFAULT_STEP), "step")?;
        let solver = SolveConfig {
            max_iters: a.iters.unwrap_or(DEFAULT_ITERS),
            step: match method {
                Method::Scalarized(kind) => default_schedule(kind, step),
                Method::Mgda => StepSchedule::Constant(step),
            },
            seed: a.seed.unwrap_or(0),
            record_every: a.record_every.unwrap_or(1),
            tolerance: a.tolerance.unwrap_or(1e-8),
            x0: None,
        };
        solver.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let out = config::out_dir(a.out, "out/solve");
        let cache_dir = a.cache_dir.unwrap_or_else(|| out.join("fronts"));
        Ok(Self { problem, method, lambda, mu, solver, resolution: config::resolution(a.resolution)?, out, cache_dir })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub config: serde_json::Value,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// Objectives normalized by the reference front's bounding box.
    pub f_normalized: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub evals: usize,
    pub gradient_passes: usize,
    pub qp_solves: usize,
    pub stop: String,
    /// `max_i − min_i` of the weighted gaps `λ_i (f̂_i − z*_i)`; zero at an
    /// exact Tchebycheff balance point.
    pub balance_residual: f64,
}

/// Runs the solve and writes `trajectory.csv` and `summary.json` into the
/// output directory. A diverged run still writes both, then fails.
pub fn run(s: &SolveSettings) -> CliResult<SolveSummary> {
    create_dir(&s.out)?;
    create_dir(&s.cache_dir)?;
    let front = ReferenceFront::load_or_compute(&s.problem, s.resolution, &s.cache_dir)?;
    let norm = front.normalization();
    let z = IdealPoint::normalized_default(s.problem.m);

    let started = Instant::now();
    let traj = match s.method {
        Method::Scalarized(kind) => {
            let spec = loss_spec(kind, norm.clone(), s.mu)?;
            solve_scalarized(&s.problem, &spec, &s.lambda, &s.solver)?
        }
        Method::Mgda => solve_mgda(&s.problem, &s.solver)?,
    };
    log::info!("solve {} {}: {:.3?}", s.problem.name(), s.method.id(), started.elapsed());

    let header = Header::new("solve")
        .with("problem", s.problem.name())
        .with("n", s.problem.n)
        .with("method", s.method.id())
        .with("lambda", join(s.lambda.values()))
        .with("mu", s.mu)
        .with("z_star", join(&z.z_star))
        .with("normalization", "reference_front_bounding_box")
        .with("resolution", s.resolution)
        .with("iters", s.solver.max_iters)
        .with("step", step_label(s.solver.step))
        .with("tolerance", s.solver.tolerance)
        .with("seed", s.solver.seed);
    write_csv(&s.out.join("trajectory.csv"), &header, &traj.to_csv())?;

    let last = traj
        .last()
        .ok_or_else(|| CliError::Numerical("no finite iterate".into()))?;
    let f_normalized = norm.apply(&last.f)?;
    let gaps: Vec<f64> = s
        .lambda
        .values()
        .iter()
        .zip(&f_normalized)
        .zip(&z.z_star)
        .map(|((l, g), z)| l * (g - z))
        .collect();
    let balance_residual =
        gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let summary = SolveSummary {
        config: header.to_json(),
        x: last.x.clone(),
        f: last.f.clone(),
        f_normalized,
        value: last.value,
        grad_norm: last.grad_norm,
        iterations: last.iter,
        evals: traj.evaluations(),
        gradient_passes: traj.cost.gradient_passes,
        qp_solves: traj.cost.qp_solves,
        stop: match &traj.stop {
            StopReason::MaxIters => "max_iters".into(),
            StopReason::Converged => "converged".into(),
            StopReason::Diverged(r) => format!("diverged: {r}"),
        },
        balance_residual,
    };
    let json = serde_json::to_value(&summary).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_json(&s.out.join("summary.json"), &json)?;
    if let StopReason::Diverged(reason) = &traj.stop {
        return Err(CliError::Numerical(format!("solve diverged: {reason}")));
    }
    Ok(summary)
}

fn step_label(step: StepSchedule) -> String {
    match step {
        StepSchedule::Constant(eta) => format!("constant:{eta}"),
        StepSchedule::InvSqrtT(eta) => format!("inv_sqrt_t:{eta}"),
    }
}
