//! Pareto set learning: a preference-conditioned MLP trained so that
//! `h_θ(λ)` approximates the solution of the `λ`-scalarized problem.

mod mlp;

use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ParetoArchive;
use crate::problems::Problem;
use crate::scalarize::{
    evenly_spaced_preferences, sample_preference, IdealPoint, Normalization, Preference,
    ScalarizationKind, ScalarizationSpec,
};

pub use mlp::{Dense, ForwardCache, MlpModel, ParamGradients, HIDDEN_LAYERS, HIDDEN_WIDTH};

/// Preference floor used while training.
pub const TRAIN_PREFERENCE_FLOOR: f64 = 1e-3;

/// Smoothing parameter for STCH set-model losses. Weighted gaps
/// `λ_i (f_i − z*_i)` on normalized objectives are roughly `1/m` in size, so
/// the library-wide default of 0.1 smooths the max too much here.
pub const PSL_DEFAULT_MU: f64 = 0.01;

/// Number of preferences used to sample a learned front.
pub const TEST_PREFERENCES: usize = 100;

/// Loss for set-model training: `kind` on objectives normalized by
/// `normalization`, with the ideal point at −0.1 in normalized units.
pub fn loss_spec(kind: ScalarizationKind, normalization: Normalization, mu: f64) -> Result<ScalarizationSpec> {
    let m = normalization.len();
    let ideal = IdealPoint::normalized_default(m);
    let spec = match kind {
        ScalarizationKind::Linear => ScalarizationSpec::linear(m),
        ScalarizationKind::Tchebycheff => ScalarizationSpec::tch(ideal),
        ScalarizationKind::SmoothTchebycheff => ScalarizationSpec::stch(ideal, mu)?,
    };
    spec.with_normalization(normalization)
}

/// Preferences for sampling a learned front: evenly spaced for two
/// objectives, seeded uniform draws otherwise. Both use the training floor.
pub fn test_preferences(m: usize, count: usize, seed: u64) -> Result<Vec<Preference>> {
    if m == 2 {
        return Ok(evenly_spaced_preferences(count, TRAIN_PREFERENCE_FLOOR));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| sample_preference(&mut rng, m, TRAIN_PREFERENCE_FLOOR))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

impl OptimizerKind {
    pub fn from_id(id: &str) -> Result<Self> {
        match id.to_ascii_lowercase().as_str() {
            "sgd" => Ok(Self::Sgd),
            "adam" => Ok(Self::Adam),
            other => Err(Error::InvalidParameter(format!("unknown optimizer '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub iterations: usize,
    pub prefs_per_iter: usize,
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub seed: u64,
    pub scalarization: ScalarizationSpec,
}

impl TrainConfig {
    pub fn new(scalarization: ScalarizationSpec, seed: u64) -> Self {
        Self {
            iterations: 2000,
            prefs_per_iter: 10,
            optimizer: OptimizerKind::Adam,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            seed,
            scalarization,
        }
    }

    /// Total number of objective evaluations.
    pub fn budget(&self) -> usize {
        self.iterations * self.prefs_per_iter
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.prefs_per_iter == 0 {
            return Err(Error::InvalidParameter(
                "iterations and prefs_per_iter must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::InvalidParameter("moment decays must lie in [0, 1)".into()));
        }
        self.scalarization.validate()
    }
}

const ADAM_EPS: f64 = 1e-8;

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(size: usize) -> Self {
        Self {
            m: vec![0.0; size],
            v: vec![0.0; size],
            t: 0,
        }
    }

    fn step(&mut self, theta: &mut [f64], grad: &[f64], cfg: &TrainConfig) {
        self.t += 1;
        let (b1, b2) = (cfg.beta1, cfg.beta2);
        let c1 = 1.0 - b1.powi(self.t);
        let c2 = 1.0 - b2.powi(self.t);
        for i in 0..theta.len() {
            self.m[i] = b1 * self.m[i] + (1.0 - b1) * grad[i];
            self.v[i] = b2 * self.v[i] + (1.0 - b2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            theta[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

/// Mean scalarized loss over a batch of preferences, and its gradient with
/// respect to the model outputs (`B × n`).
pub fn batch_loss(
    problem: &Problem,
    spec: &ScalarizationSpec,
    x: &Array2<f64>,
    prefs: &[Preference],
) -> Result<(f64, Array2<f64>)> {
    let b = prefs.len();
    let mut upstream = Array2::zeros(x.dim());
    let mut loss = 0.0;
    for (i, lambda) in prefs.iter().enumerate() {
        let xi = x.row(i).to_vec();
        let (f, jac) = problem.evaluate_with_jacobian(&xi)?;
        let r = spec.scalarize(f.values(), Some(&jac), lambda)?;
        loss += r.value;
        let grad = r.gradient.expect("jacobian supplied");
        for (u, g) in upstream.row_mut(i).iter_mut().zip(&grad) {
            *u = g / b as f64;
        }
    }
    Ok((loss / b as f64, upstream))
}

fn prefs_matrix(prefs: &[Preference]) -> Array2<f64> {
    let m = prefs.first().map_or(0, |p| p.len());
    let flat: Vec<f64> = prefs.iter().flat_map(|p| p.values().iter().copied()).collect();
    Array2::from_shape_vec((prefs.len(), m), flat).expect("preferences share a length")
}

/// Trained model and the per-iteration mean loss.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: MlpModel,
    pub loss_history: Vec<f64>,
}

/// Trains a Pareto set model. The scalarization spec should carry the
/// objective normalization used inside the loss.
pub fn train(problem: &Problem, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let spec = &config.scalarization;
    let m = problem.m;
    let mut model = MlpModel::init(m, problem.lower.clone(), problem.upper.clone(), config.seed)?;
    // preferences come from a stream independent of the initialization
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut theta = model.flatten();
    let mut adam = Adam::new(theta.len());
    let mut loss_history = Vec::with_capacity(config.iterations);

    for iteration in 0..config.iterations {
        let prefs: Vec<Preference> = (0..config.prefs_per_iter)
            .map(|_| sample_preference(&mut rng, m, TRAIN_PREFERENCE_FLOOR))
            .collect::<Result<_>>()?;
        let (x, cache) = model.forward_batch(&prefs_matrix(&prefs))?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                iteration,
                reason: "model output is not finite".into(),
            });
        }
        let (loss, upstream) = batch_loss(problem, spec, &x, &prefs).map_err(|e| match e {
            Error::NonFinite(reason) => Error::Divergence { iteration, reason },
            other => other,
        })?;
        if !loss.is_finite() {
            return Err(Error::Divergence {
                iteration,
                reason: format!("loss is {loss}"),
            });
        }
        loss_history.push(loss);
        let grad = model.backward(&cache, &upstream)?.flatten();
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Divergence {
                iteration,
                reason: "non-finite parameter gradient".into(),
            });
        }
        match config.optimizer {
            OptimizerKind::Adam => adam.step(&mut theta, &grad, config),
            OptimizerKind::Sgd => theta
                .iter_mut()
                .zip(&grad)
                .for_each(|(t, g)| *t -= config.learning_rate * g),
        }
        model.set_flat(&theta)?;
        if (iteration + 1) % 500 == 0 {
            log::debug!("psl {} iteration {} loss {loss:.6e}", problem.name(), iteration + 1);
        }
    }
    Ok(TrainOutcome {
        model,
        loss_history,
    })
}

/// Decision vectors and objectives for each preference, in input order.
pub fn predict(model: &MlpModel, problem: &Problem, prefs: &[Preference]) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    if prefs.is_empty() {
        return Ok(Vec::new());
    }
    let (x, _) = model.forward_batch(&prefs_matrix(prefs))?;
    x.rows()
        .into_iter()
        .map(|row| {
            let xi = row.to_vec();
            let f = problem.evaluate(&xi)?.values().to_vec();
            Ok((xi, f))
        })
        .collect()
}

/// Evaluates the model at each preference and keeps the non-dominated
/// solutions. Preferences mapping to non-finite objectives are skipped.
pub fn sample_front(
    model: &MlpModel,
    problem: &Problem,
    prefs: &[Preference],
    reference_point: Vec<f64>,
) -> Result<ParetoArchive> {
    let mut archive = ParetoArchive::new(reference_point);
    if prefs.is_empty() {
        return Ok(archive);
    }
    let (x, _) = model.forward_batch(&prefs_matrix(prefs))?;
    for row in x.rows() {
        let xi = row.to_vec();
        match problem.evaluate(&xi) {
            Ok(f) => {
                archive.insert(xi, f.values().to_vec())?;
            }
            Err(Error::NonFinite(reason)) => log::warn!("skipping sample: {reason}"),
            Err(e) => return Err(e),
        }
    }
    Ok(archive)
}

/// Provenance stored alongside checkpointed parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub problem: String,
    pub scalarization: ScalarizationSpec,
    pub seed: u64,
    pub iterations: usize,
    pub prefs_per_iter: usize,
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
}

impl CheckpointHeader {
    pub fn new(problem: &Problem, config: &TrainConfig) -> Self {
        Self {
            problem: problem.name().to_string(),
            scalarization: config.scalarization.clone(),
            seed: config.seed,
            iterations: config.iterations,
            prefs_per_iter: config.prefs_per_iter,
            optimizer: config.optimizer,
            learning_rate: config.learning_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub model: MlpModel,
}

impl Checkpoint {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(&mut file, self).map_err(|e| Error::Io(e.to_string()))?;
        file.flush()?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        serde_json::from_reader(file).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Loss history as `iteration,loss` CSV.
pub fn loss_history_csv(history: &[f64]) -> String {
    let mut out = String::from("iteration,loss\n");
    for (i, l) in history.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, l));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemId;
    use crate::scalarize::IdealPoint;

    fn short_config(seed: u64) -> TrainConfig {
        let mut cfg = TrainConfig::new(ScalarizationSpec::stch(IdealPoint::normalized_default(2), 0.1).unwrap(), seed);
        cfg.iterations = 5;
        cfg
    }

    #[test]
    fn training_is_deterministic() {
        let problem = Problem::with_dim(ProblemId::F1, 5).unwrap();
        let a = train(&problem, &short_config(4)).unwrap();
        let b = train(&problem, &short_config(4)).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.loss_history, b.loss_history);
        let c = train(&problem, &short_config(5)).unwrap();
        assert_ne!(a.model, c.model);
    }

    #[test]
    fn config_validation() {
        let mut cfg = short_config(0);
        cfg.iterations = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = short_config(0);
        cfg.learning_rate = -1.0;
        assert!(cfg.validate().is_err());
        assert_eq!(TrainConfig::new(ScalarizationSpec::linear(2), 0).budget(), 20_000);
    }

    #[test]
    fn checkpoint_round_trip() {
        let problem = Problem::with_dim(ProblemId::F4, 3).unwrap();
        let cfg = short_config(1);
        let out = train(&problem, &cfg).unwrap();
        let ckpt = Checkpoint {
            header: CheckpointHeader::new(&problem, &cfg),
            model: out.model,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        ckpt.write_json(&path).unwrap();
        assert_eq!(Checkpoint::read_json(&path).unwrap(), ckpt);
    }

    #[test]
    fn loss_csv_layout() {
        assert_eq!(loss_history_csv(&[0.5, 0.25]), "iteration,loss\n1,0.5\n2,0.25\n");
    }
}
