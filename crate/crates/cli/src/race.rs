//! `stch race`: TCH subgradient descent vs STCH gradient descent on the toy
//! problem `f1 = x², f2 = (x − 1)²`, both started from the same seeded point.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use stch::problems::{Problem, ProblemId};
use stch::solvers::{solve_scalarized, SolveConfig, StepSchedule};
use stch::{IdealPoint, Preference, ScalarizationSpec};

use crate::args::RaceArgs;
use crate::config;
use crate::output::{create_dir, csv_text, join, num, write_csv, Header};
use crate::{CliError, CliResult};

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_ITERS: usize = 200;
pub const DEFAULT_MU: f64 = 0.05;
/// STCH's smoothness constant on the toy grows like `1/μ`; at μ = 0.05 a
/// constant step of 0.5 overshoots and oscillates, 0.25 contracts.
pub const DEFAULT_STCH_STEP: f64 = 0.25;
pub const DEFAULT_TCH_STEP: f64 = 0.5;
pub const TOY_IDEAL: f64 = -0.1;

#[derive(Debug, Clone)]
pub struct RaceSettings {
    pub trials: usize,
    pub iters: usize,
    pub mu: f64,
    pub lambda: Preference,
    pub stch_step: f64,
    pub tch_step: f64,
    pub seed: u64,
    pub out: PathBuf,
}

impl RaceSettings {
    pub fn resolve(args: RaceArgs) -> CliResult<Self> {
        let file = config::load(args.config.as_deref())?;
        let a = args.overlay(file);
        let lambda = match a.lambda {
            Some(v) if v.len() != 2 => return Err(CliError::Config("race lambda needs two entries".into())),
            Some(v) => Preference::new(v).map_err(|e| CliError::Config(e.to_string()))?,
            None => Preference::uniform(2),
        };
        Ok(Self {
            trials: config::at_least(a.trials.unwrap_or(DEFAULT_TRIALS), 1, "trials")?,
            iters: config::at_least(a.iters.unwrap_or(DEFAULT_ITERS), 1, "iters")?,
            mu: config::positive(a.mu.unwrap_or(DEFAULT_MU), "mu")?,
            lambda,
            stch_step: config::positive(a.stch_step.unwrap_or(DEFAULT_STCH_STEP), "stch_step")?,
            tch_step: config::positive(a.tch_step.unwrap_or(DEFAULT_TCH_STEP), "tch_step")?,
            seed: a.seed.unwrap_or(0),
            out: config::out_dir(a.out, "out/race"),
        })
    }
}

/// Mean and median gap `|x − x*|` per evaluation count.
#[derive(Debug, Clone, PartialEq)]
pub struct RaceCurves {
    /// TCH minimizer both methods are measured against.
    pub x_star: f64,
    pub evals: Vec<usize>,
    pub mean_tch: Vec<f64>,
    pub median_tch: Vec<f64>,
    pub mean_stch: Vec<f64>,
    pub median_stch: Vec<f64>,
}

impl RaceCurves {
    /// First evaluation count at which `curve` is at or below `gap`.
    pub fn first_below(&self, curve: &[f64], gap: f64) -> Option<usize> {
        curve.iter().position(|&g| g <= gap).map(|i| self.evals[i])
    }
}

/// Minimizer of the Tchebycheff scalarization on the toy, by ternary search
/// on the convex function `max_i λ_i (f_i(x) − z*_i)` over `[−1, 2]`.
pub fn toy_tch_minimizer(lambda: &Preference) -> f64 {
    let l = lambda.values();
    let g = |x: f64| (l[0] * (x * x - TOY_IDEAL)).max(l[1] * ((x - 1.0) * (x - 1.0) - TOY_IDEAL));
    let (mut a, mut b) = (-1.0f64, 2.0f64);
    for _ in 0..200 {
        let c = a + (b - a) / 3.0;
        let d = b - (b - a) / 3.0;
        if g(c) <= g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

fn gaps(problem: &Problem, spec: &ScalarizationSpec, lambda: &Preference, cfg: &SolveConfig, x_star: f64, len: usize) -> CliResult<Vec<f64>> {
    let traj = solve_scalarized(problem, spec, lambda, cfg)?;
    if traj.diverged() {
        return Err(CliError::Numerical(format!("race trial with seed {} diverged", cfg.seed)));
    }
    let mut out: Vec<f64> = traj.iterates.iter().map(|it| (it.x[0] - x_star).abs()).collect();
    // a run that stopped early keeps its final gap
    let last = *out.last().unwrap_or(&f64::NAN);
    out.resize(len, last);
    out.truncate(len);
    Ok(out)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn curves(s: &RaceSettings) -> CliResult<RaceCurves> {
    let problem = Problem::new(ProblemId::Toy);
    let ideal = IdealPoint::new(vec![TOY_IDEAL; 2]);
    let tch = ScalarizationSpec::tch(ideal.clone());
    let stch = ScalarizationSpec::stch(ideal, s.mu)?;
    let x_star = toy_tch_minimizer(&s.lambda);
    let len = s.iters + 1;
    let config = |seed: u64, step: StepSchedule| SolveConfig {
        max_iters: s.iters,
        step,
        seed,
        record_every: 1,
        tolerance: 0.0,
        x0: None,
    };
    let trials: Vec<(Vec<f64>, Vec<f64>)> = (0..s.trials as u64)
        .into_par_iter()
        .map(|k| {
            let seed = s.seed + k;
            let t = gaps(&problem, &tch, &s.lambda, &config(seed, StepSchedule::InvSqrtT(s.tch_step)), x_star, len)?;
            let g = gaps(&problem, &stch, &s.lambda, &config(seed, StepSchedule::Constant(s.stch_step)), x_star, len)?;
            Ok((t, g))
        })
        .collect::<CliResult<_>>()?;


    let mut c = RaceCurves {
        x_star,
        evals: (1..=len).collect(),
        mean_tch: Vec::with_capacity(len),
        median_tch: Vec::with_capacity(len),
        mean_stch: Vec::with_capacity(len),
        median_stch: Vec::with_capacity(len),
    };
    for i in 0..len {
        let mut t: Vec<f64> = trials.iter().map(|p| p.0[i]).collect();
        let mut g: Vec<f64> = trials.iter().map(|p| p.1[i]).collect();
        c.mean_tch.push(mean(&t));
        c.median_tch.push(median(&mut t));
        c.mean_stch.push(mean(&g));
        c.median_stch.push(median(&mut g));
    }
    Ok(c)
}

/// Writes `race.csv` with columns
/// `evals, mean_gap_tch, median_gap_tch, mean_gap_stch, median_gap_stch`.
pub fn run(s: &RaceSettings) -> CliResult<RaceCurves> {
    let started = Instant::now();
    let c = curves(s)?;
    log::info!("race: {} trials in {:.3?}", s.trials, started.elapsed());
    create_dir(&s.out)?;
    let header = Header::new("race")
        .with("problem", "toy")
        .with("methods", "tch;stch")
        .with("lambda", join(s.lambda.values()))
        .with("mu", s.mu)
        .with("z_star", join(&[TOY_IDEAL, TOY_IDEAL]))
        .with("stch_step", format!("constant:{}", s.stch_step))
        .with("tch_step", format!("inv_sqrt_t:{}", s.tch_step))
        .with("x_star", num(c.x_star))
        .with("trials", s.trials)
        .with("seeds", format!("{}..{}", s.seed, s.seed + s.trials as u64 - 1))
        .with("iters", s.iters);
    let rows = (0..c.evals.len()).map(|i| {
        vec![
            c.evals[i].to_string(),
            num(c.mean_tch[i]),
            num(c.median_tch[i]),
            num(c.mean_stch[i]),
            num(c.median_stch[i]),
        ]
    });
    let body = csv_text(&["evals", "mean_gap_tch", "median_gap_tch", "mean_gap_stch", "median_gap_stch"], rows)?;
    write_csv(&s.out.join("race.csv"), &header, &body)?;
    Ok(c)
}
