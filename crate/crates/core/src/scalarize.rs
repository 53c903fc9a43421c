//! Scalarization functions and the value types they operate on.
//!
//! Three scalarizations reduce an objective vector `f` to a scalar for a
//! preference `λ` on the simplex:
//!
//! * linear: `Σ λ_i f_i`
//! * Tchebycheff (TCH): `max_i λ_i (f_i − z*_i)`, nonsmooth
//! * smooth Tchebycheff (STCH): `μ log Σ exp(λ_i (f_i − z*_i) / μ)`, which
//!   over-approximates TCH by at most `μ log m`.
//!
//! STCH is always evaluated with the max-shift, so no input overflows.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;

/// Smoothing parameter used when none is configured.
pub const DEFAULT_MU: f64 = 0.1;

/// Offset below the (normalized) known minimum used for the ideal point.
pub const DEFAULT_IDEAL_EPSILON: f64 = 0.1;

/// Relative tolerance under which two Tchebycheff terms count as tied.
const TIE_RTOL: f64 = 1e-12;

/// A point in objective space. Every entry is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "objective {i} = {}",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ObjectiveVector> for Vec<f64> {
    fn from(v: ObjectiveVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for ObjectiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Preference vector on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Preference(Vec<f64>);

impl Preference {
    /// Validates simplex membership: non-negative entries summing to one
    /// within `1e-9`.
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidPreference("empty preference".into()));
        }
        if lambda.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return Err(Error::InvalidPreference(format!(
                "entries must be finite and non-negative: {lambda:?}"
            )));
        }
        let sum: f64 = lambda.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPreference(format!(
                "entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self(lambda))
    }

    /// Rescales non-negative weights onto the simplex.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidPreference(format!(
                "cannot normalize {weights:?}"
            )));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Preference {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Preference> for Vec<f64> {
    fn from(p: Preference) -> Self {
        p.0
    }
}

/// Ideal objective values `z*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealPoint {
    pub z_star: Vec<f64>,
    /// Offset subtracted from observed minima when the point was derived.
    pub epsilon: f64,
}

impl IdealPoint {
    pub fn new(z_star: Vec<f64>) -> Self {
        Self {
            z_star,
            epsilon: 0.0,
        }
    }

    /// `z*_i = min_i − ε`.
    pub fn from_minima(minima: &[f64], epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ideal-point epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            z_star: minima.iter().map(|v| v - epsilon).collect(),
            epsilon,
        })
    }

    /// Ideal point for normalized objectives whose minimum is 0.
    pub fn normalized_default(m: usize) -> Self {
        Self {
            z_star: vec![-DEFAULT_IDEAL_EPSILON; m],
            epsilon: DEFAULT_IDEAL_EPSILON,
        }
    }

    pub fn len(&self) -> usize {
        self.z_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_star.is_empty()
    }
}

/// Per-objective affine bounds mapping `f_min → 0`, `f_max → 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub f_min: Vec<f64>,
    pub f_max: Vec<f64>,
}

impl Normalization {
    pub fn new(f_min: Vec<f64>, f_max: Vec<f64>) -> Result<Self> {
        check_len(f_min.len(), f_max.len())?;
        for (i, (lo, hi)) in f_min.iter().zip(&f_max).enumerate() {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "normalization bounds for objective {i} not ordered: [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { f_min, f_max })
    }

    pub fn len(&self) -> usize {
        self.f_min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_min.is_empty()
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), f.len())?;
        Ok(f.iter()
            .zip(self.f_min.iter().zip(&self.f_max))
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect())
    }

    /// Inverse of [`Normalization::apply`].
    pub fn restore(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), f.len())?;
        Ok(f.iter()
            .zip(self.f_min.iter().zip(&self.f_max))
            .map(|(v, (lo, hi))| lo + v * (hi - lo))
            .collect())
    }

    fn inverse_ranges(&self) -> Vec<f64> {
        self.f_min
            .iter()
            .zip(&self.f_max)
            .map(|(lo, hi)| 1.0 / (hi - lo))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarizationKind {
    #[serde(rename = "ls")]
    Linear,
    #[serde(rename = "tch")]
    Tchebycheff,
    #[serde(rename = "stch")]
    SmoothTchebycheff,
}

impl ScalarizationKind {
    pub fn id(self) -> &'static str {
        match self {
            Self::Linear => "ls",
            Self::Tchebycheff => "tch",
            Self::SmoothTchebycheff => "stch",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        match id.to_ascii_lowercase().as_str() {
            "ls" | "linear" => Some(Self::Linear),
            "tch" => Some(Self::Tchebycheff),
            "stch" => Some(Self::SmoothTchebycheff),
            _ => None,
        }
    }

    /// Whether the scalarization is differentiable, so gradient-norm stopping
    /// is meaningful.
    pub fn is_smooth(self) -> bool {
        !matches!(self, Self::Tchebycheff)
    }
}

impl std::fmt::Display for ScalarizationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Which scalarization to apply and with what parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarizationSpec {
    pub kind: ScalarizationKind,
    pub mu: f64,
    pub ideal: IdealPoint,
    pub normalization: Option<Normalization>,
}

impl ScalarizationSpec {
    pub fn new(kind: ScalarizationKind, mu: f64, ideal: IdealPoint) -> Result<Self> {
        let spec = Self {
            kind,
            mu,
            ideal,
            normalization: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn linear(m: usize) -> Self {
        Self {
            kind: ScalarizationKind::Linear,
            mu: DEFAULT_MU,
            ideal: IdealPoint::new(vec![0.0; m]),
            normalization: None,
        }
    }

    pub fn tch(ideal: IdealPoint) -> Self {
        Self {
            kind: ScalarizationKind::Tchebycheff,
            mu: DEFAULT_MU,
            ideal,
            normalization: None,
        }
    }

    pub fn stch(ideal: IdealPoint, mu: f64) -> Result<Self> {
        Self::new(ScalarizationKind::SmoothTchebycheff, mu, ideal)
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Result<Self> {
        check_len(self.ideal.len(), normalization.len())?;
        self.normalization = Some(normalization);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == ScalarizationKind::SmoothTchebycheff && !(self.mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "smoothing parameter must be positive, got {}",
                self.mu
            )));
        }
        if let Some(n) = &self.normalization {
            check_len(self.ideal.len(), n.len())?;
        }
        Ok(())
    }

    /// Scalarizes raw objectives `f` with Jacobian `jacobian` (m × n).
    ///
    /// Normalization, when configured, is applied to both the values and the
    /// Jacobian rows before dispatching on the kind. The returned weights are
    /// the per-objective coefficients of the (sub)gradient combination in the
    /// normalized space.
    pub fn scalarize(
        &self,
        f: &[f64],
        jacobian: Option<&Matrix>,
        lambda: &Preference,
    ) -> Result<ScalarizationResult> {
        self.validate()?;
        let m = self.ideal.len();
        check_len(m, f.len())?;
        check_len(m, lambda.len())?;

        let (f_hat, row_scale) = match &self.normalization {
            Some(n) => (n.apply(f)?, Some(n.inverse_ranges())),
            None => (f.to_vec(), None),
        };

        let (value, weights) = match self.kind {
            ScalarizationKind::Linear => (linear_value(&f_hat, lambda), lambda.values().to_vec()),
            ScalarizationKind::Tchebycheff => {
                let (value, k) = tch_value(&f_hat, lambda, &self.ideal.z_star);
                let mut w = vec![0.0; m];
                w[k] = lambda.values()[k];
                (value, w)
            }
            ScalarizationKind::SmoothTchebycheff => {
                stch_value(&f_hat, lambda, &self.ideal.z_star, self.mu)
            }
        };

        let gradient = match jacobian {
            Some(jac) => {
                if jac.rows() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        found: jac.rows(),
                    });
                }
                let coeffs: Vec<f64> = match &row_scale {
                    Some(s) => weights.iter().zip(s).map(|(w, s)| w * s).collect(),
                    None => weights.clone(),
                };
                Some(jac.combine_rows(&coeffs)?)
            }
            None => None,
        };

        Ok(ScalarizationResult {
            value,
            weights,
            gradient,
        })
    }
}

/// Output of a scalarization: value, combination weights, optional gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarizationResult {
    pub value: f64,
    /// Coefficients `w_i` such that the (sub)gradient is `Σ w_i ∇f_i`. For
    /// STCH these include the `λ_i` factor and sum to at most 1.
    pub weights: Vec<f64>,
    pub gradient: Option<Vec<f64>>,
}

impl ScalarizationResult {
    /// Weights rescaled onto the simplex (`w̄ = w / Σ w`).
    pub fn normalized_weights(&self) -> Vec<f64> {
        let s: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / s).collect()
    }
}

fn linear_value(f: &[f64], lambda: &Preference) -> f64 {
    f.iter().zip(lambda.values()).map(|(fi, li)| fi * li).sum()
}

fn weighted_gaps(f: &[f64], lambda: &Preference, z_star: &[f64]) -> Vec<f64> {
    f.iter()
        .zip(lambda.values())
        .zip(z_star)
        .map(|((fi, li), zi)| li * (fi - zi))
        .collect()
}

/// Returns `(max y_i, lowest index whose y_i ties the max)`.
fn argmax_low_tie(y: &[f64]) -> (f64, usize) {
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_RTOL * max.abs().max(1.0);
    let k = y.iter().position(|&v| v >= max - tol).unwrap_or(0);
    (max, k)
}

fn tch_value(f: &[f64], lambda: &Preference, z_star: &[f64]) -> (f64, usize) {
    argmax_low_tie(&weighted_gaps(f, lambda, z_star))
}

fn stch_value(f: &[f64], lambda: &Preference, z_star: &[f64], mu: f64) -> (f64, Vec<f64>) {
    let y = weighted_gaps(f, lambda, z_star);
    let (y_max, k) = argmax_low_tie(&y);
    // Shifted exponents are <= 0, so each term lies in [0, 1].
    let e: Vec<f64> = y.iter().map(|yi| ((yi - y_max) / mu).exp()).collect();
    let rest: f64 = e
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, v)| v)
        .sum();
    let denom = e[k] + rest;
    let value = y_max + mu * (e[k] - 1.0 + rest).ln_1p();
    let weights = e
        .iter()
        .zip(lambda.values())
        .map(|(ei, li)| li * ei / denom)
        .collect();
    (value, weights)
}

/// Linear scalarization `Σ λ_i f_i`.
pub fn eval_ls(f: &ObjectiveVector, lambda: &Preference) -> Result<f64> {
    check_len(f.len(), lambda.len())?;
    Ok(linear_value(f.values(), lambda))
}

fn check_spec(f: &ObjectiveVector, lambda: &Preference, spec: &ScalarizationSpec) -> Result<()> {
    spec.validate()?;
    check_len(f.len(), lambda.len())?;
    check_len(f.len(), spec.ideal.len())
}

/// Tchebycheff value and active objective (ties go to the lowest index).
/// `spec.kind` is not consulted; only the ideal point is used.
pub fn eval_tch(
    f: &ObjectiveVector,
    lambda: &Preference,
    spec: &ScalarizationSpec,
) -> Result<(f64, usize)> {
    check_spec(f, lambda, spec)?;
    Ok(tch_value(f.values(), lambda, &spec.ideal.z_star))
}

/// One subgradient of the Tchebycheff scalarization: `λ_k ∇f_k` for the
/// active objective `k`.
pub fn tch_subgradient(
    f: &ObjectiveVector,
    jacobian: &Matrix,
    lambda: &Preference,
    spec: &ScalarizationSpec,
) -> Result<Vec<f64>> {
    check_spec(f, lambda, spec)?;
    if jacobian.rows() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: f.len(),
            found: jacobian.rows(),
        });
    }
    let (_, k) = tch_value(f.values(), lambda, &spec.ideal.z_star);
    let lk = lambda.values()[k];
    Ok(jacobian.row(k).iter().map(|g| lk * g).collect())
}

/// Smooth Tchebycheff value and gradient-combination weights.
pub fn eval_stch(
    f: &ObjectiveVector,
    lambda: &Preference,
    spec: &ScalarizationSpec,
) -> Result<ScalarizationResult> {
    check_spec(f, lambda, spec)?;
    if !(spec.mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothing parameter must be positive, got {}",
            spec.mu
        )));
    }
    let (value, weights) = stch_value(f.values(), lambda, &spec.ideal.z_star, spec.mu);
    Ok(ScalarizationResult {
        value,
        weights,
        gradient: None,
    })
}

/// Gradient of the smooth Tchebycheff scalarization, `Σ w_i ∇f_i`.
pub fn grad_stch(
    f: &ObjectiveVector,
    jacobian: &Matrix,
    lambda: &Preference,
    spec: &ScalarizationSpec,
) -> Result<Vec<f64>> {
    let res = eval_stch(f, lambda, spec)?;
    if jacobian.rows() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: f.len(),
            found: jacobian.rows(),
        });
    }
    jacobian.combine_rows(&res.weights)
}

/// `(f_i − f_min_i) / (f_max_i − f_min_i)`, not clamped.
pub fn normalize(f: &ObjectiveVector, f_min: &[f64], f_max: &[f64]) -> Result<ObjectiveVector> {
    let n = Normalization::new(f_min.to_vec(), f_max.to_vec())?;
    ObjectiveVector::new(n.apply(f.values())?)
}

/// Uniform draw from the simplex mixed with a floor so that `λ_i ≥ floor`.
pub fn sample_preference<R: Rng + ?Sized>(rng: &mut R, m: usize, floor: f64) -> Result<Preference> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "preferences need at least 2 objectives, got {m}"
        )));
    }
    if !(floor >= 0.0) || floor * m as f64 >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "preference floor {floor} invalid for m = {m}"
        )));
    }
    // Normalized unit exponentials are uniform on the simplex.
    let e: Vec<f64> = (0..m)
        .map(|_| {
            let u: f64 = rng.gen();
            -(1.0 - u).ln()
        })
        .collect();
    let sum: f64 = e.iter().sum();
    let scale = 1.0 - m as f64 * floor;
    let lambda: Vec<f64> = e.iter().map(|v| scale * v / sum + floor).collect();
    // Re-normalize away rounding so the simplex check always holds.
    let total: f64 = lambda.iter().sum();
    Ok(Preference(lambda.into_iter().map(|l| l / total).collect()))
}

/// `n` evenly spaced two-objective preferences from `(floor, 1 − floor)`
/// to `(1 − floor, floor)`.
pub fn evenly_spaced_preferences(n: usize, floor: f64) -> Vec<Preference> {
    (0..n)
        .map(|i| {
            let t = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
            let l1 = floor + (1.0 - 2.0 * floor) * t;
            Preference(vec![l1, 1.0 - l1])
        })
        .collect()
}
