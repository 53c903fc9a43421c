//! Single-preference optimizers: projected (sub)gradient descent on a
//! scalarization and the MGDA baseline.

mod min_norm;

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::norm;
use crate::problems::Problem;
use crate::scalarize::{Preference, ScalarizationKind, ScalarizationSpec};

pub use min_norm::{min_norm_residual, min_norm_weights, FW_GAP_TOL, FW_MAX_ITERS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", content = "eta", rename_all = "snake_case")]
pub enum StepSchedule {
    /// `η_t = η`
    Constant(f64),
    /// `η_t = η_0 / √t`
    InvSqrtT(f64),
}

impl StepSchedule {
    pub fn at(self, t: usize) -> f64 {
        match self {
            StepSchedule::Constant(eta) => eta,
            StepSchedule::InvSqrtT(eta0) => eta0 / (t.max(1) as f64).sqrt(),
        }
    }

    fn base(self) -> f64 {
        match self {
            StepSchedule::Constant(e) | StepSchedule::InvSqrtT(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub max_iters: usize,
    pub step: StepSchedule,
    pub seed: u64,
    /// Record every k-th iterate (the last one is always recorded).
    pub record_every: usize,
    /// Gradient-norm threshold for smooth scalarizations and MGDA.
    pub tolerance: f64,
    /// Starting point; sampled uniformly in the box from `seed` when absent.
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            step: StepSchedule::Constant(0.1),
            seed: 0,
            record_every: 1,
            tolerance: 1e-8,
            x0: None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.step.base() > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive, got {}",
                self.step.base()
            )));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidParameter("tolerance must be >= 0".into()));
        }
        if self.record_every < 1 {
            return Err(Error::InvalidParameter("record_every must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub iter: usize,
    /// Cumulative objective evaluations, this one included.
    pub evals: usize,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// Scalarization value (`½‖d‖²` for MGDA).
    pub value: f64,
    /// Norm of the search direction at `x`.
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StopReason {
    MaxIters,
    Converged,
    Diverged(String),
}

/// Work counters. A scalarized step needs one backward pass through the
/// combined objective; MGDA needs one per objective plus a QP.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cost {
    pub evaluations: usize,
    pub gradient_passes: usize,
    pub qp_solves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub iterates: Vec<Iterate>,
    pub cost: Cost,
    pub stop: StopReason,
}

impl Trajectory {
    /// The last recorded iterate, which is always the final finite one.
    pub fn last(&self) -> Option<&Iterate> {
        self.iterates.last()
    }

    pub fn evaluations(&self) -> usize {
        self.cost.evaluations
    }

    pub fn diverged(&self) -> bool {
        matches!(self.stop, StopReason::Diverged(_))
    }

    /// CSV with columns `iter, evals, x…, f…, value, grad_norm`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let (n, m) = self
            .iterates
            .first()
            .map_or((0, 0), |it| (it.x.len(), it.f.len()));
        let mut header = vec!["iter".to_string(), "evals".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=m).map(|i| format!("f{i}")));
        header.push("value".into());
        header.push("grad_norm".into());
        let _ = writeln!(out, "{}", header.join(","));
        for it in &self.iterates {
            let mut row = vec![it.iter.to_string(), it.evals.to_string()];
            row.extend(it.x.iter().map(|v| v.to_string()));
            row.extend(it.f.iter().map(|v| v.to_string()));
            row.push(it.value.to_string());
            row.push(it.grad_norm.to_string());
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Componentwise clamp of `x` into `[lower, upper]`.
pub fn project_box(x: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(lower.iter().zip(upper))
        .map(|(v, (l, u))| v.clamp(*l, *u))
        .collect()
}

fn initial_point(problem: &Problem, config: &SolveConfig) -> Result<Vec<f64>> {
    if let Some(x0) = &config.x0 {
        check_len(problem.n, x0.len())?;
        return Ok(project_box(x0, &problem.lower, &problem.upper));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(problem
        .lower
        .iter()
        .zip(&problem.upper)
        .map(|(l, u)| l + rng.gen::<f64>() * (u - l))
        .collect())
}

/// How the search direction is formed at each iterate.
enum Direction<'a> {
    Scalarized {
        spec: &'a ScalarizationSpec,
        lambda: &'a Preference,
    },
    MinNorm,
}

fn descend(problem: &Problem, config: &SolveConfig, dir: Direction<'_>) -> Result<Trajectory> {
    config.validate()?;
    let smooth = match &dir {
        Direction::Scalarized { spec, lambda } => {
            spec.validate()?;
            check_len(problem.m, lambda.len())?;
            check_len(problem.m, spec.ideal.len())?;
            spec.kind.is_smooth()
        }
        Direction::MinNorm => true,
    };

    let mut x = initial_point(problem, config)?;
    let mut cost = Cost::default();
    let mut iterates: Vec<Iterate> = Vec::new();
    let mut stop = StopReason::MaxIters;

    for t in 0..=config.max_iters {
        let step = problem.evaluate_with_jacobian(&x).and_then(|(f, jac)| {
            let (value, d) = match &dir {
                Direction::Scalarized { spec, lambda } => {
                    let r = spec.scalarize(f.values(), Some(&jac), lambda)?;
                    (r.value, r.gradient.expect("jacobian supplied"))
                }
                Direction::MinNorm => {
                    let alpha = min_norm_weights(&jac);
                    let d = jac.combine_rows(&alpha)?;
                    let sq: f64 = d.iter().map(|v| v * v).sum();
                    (0.5 * sq, d)
                }
            };
            Ok((f, value, d))
        });
        let (f, value, d) = match step {
            Ok(s) if s.1.is_finite() && s.2.iter().all(|v| v.is_finite()) => s,
            Ok(s) => {
                stop = StopReason::Diverged(format!("non-finite value {} at iteration {t}", s.1));
                break;
            }
            Err(e) => {
                stop = StopReason::Diverged(format!("iteration {t}: {e}"));
                break;
            }
        };
        cost.evaluations += 1;
        match dir {
            Direction::Scalarized { .. } => cost.gradient_passes += 1,
            Direction::MinNorm => {
                cost.gradient_passes += problem.m;
                cost.qp_solves += 1;
            }
        }

        let grad_norm = norm(&d);
        let converged = smooth && grad_norm < config.tolerance;
        let last = converged || t == config.max_iters;
        if t % config.record_every == 0 || last {
            iterates.push(Iterate {
                iter: t,
                evals: cost.evaluations,
                x: x.clone(),
                f: f.into_inner(),
                value,
                grad_norm,
            });
        }
        if converged {
            stop = StopReason::Converged;
            break;
        }
        if t == config.max_iters {
            break;
        }
        let eta = config.step.at(t + 1);
        let moved: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi - eta * di).collect();
        x = project_box(&moved, &problem.lower, &problem.upper);
    }

    Ok(Trajectory {
        iterates,
        cost,
        stop,
    })
}

/// Projected (sub)gradient descent on one scalarization for one preference.
///
/// Smooth scalarizations (LS, STCH) stop once the gradient norm drops below
/// `config.tolerance`; TCH always runs `max_iters` steps. A non-finite value
/// ends the run with [`StopReason::Diverged`] and the last finite iterate
/// recorded.
pub fn solve_scalarized(
    problem: &Problem,
    spec: &ScalarizationSpec,
    lambda: &Preference,
    config: &SolveConfig,
) -> Result<Trajectory> {
    descend(problem, config, Direction::Scalarized { spec, lambda })
}

/// Multiple gradient descent: steps along the min-norm convex combination
/// of objective gradients until it (nearly) vanishes.
pub fn solve_mgda(problem: &Problem, config: &SolveConfig) -> Result<Trajectory> {
    descend(problem, config, Direction::MinNorm)
}

/// Default step schedule per scalarization: constant for smooth ones,
/// `η_0/√t` for TCH.
pub fn default_schedule(kind: ScalarizationKind, eta: f64) -> StepSchedule {
    match kind {
        ScalarizationKind::Tchebycheff => StepSchedule::InvSqrtT(eta),
        _ => StepSchedule::Constant(eta),
    }
}
