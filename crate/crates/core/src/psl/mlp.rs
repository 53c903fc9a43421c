//! Preference-conditioned MLP: `m → 256 → 256 → 256 → n` with rectifier
//! hidden units and a logistic output mapped affinely onto the decision box.

use ndarray::{Array1, Array2, Axis, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::scalarize::Preference;

pub const HIDDEN_WIDTH: usize = 256;
pub const HIDDEN_LAYERS: usize = 3;

/// One affine layer; `weights` is `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weights: Array2::zeros((outputs, inputs)),
            bias: Array1::zeros(outputs),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.nrows()
    }
}

/// Serialized layer: shape plus row-major weights and bias.
#[derive(Serialize, Deserialize)]
struct DenseRecord {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

/// Pareto set model `h_θ(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRecord", into = "ModelRecord")]
pub struct MlpModel {
    pub layers: Vec<Dense>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    lower: Vec<f64>,
    upper: Vec<f64>,
    layers: Vec<DenseRecord>,
}

impl From<MlpModel> for ModelRecord {
    fn from(m: MlpModel) -> Self {
        Self {
            lower: m.lower,
            upper: m.upper,
            layers: m
                .layers
                .into_iter()
                .map(|l| DenseRecord {
                    rows: l.outputs(),
                    cols: l.inputs(),
                    weights: l.weights.iter().copied().collect(),
                    bias: l.bias.to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<ModelRecord> for MlpModel {
    type Error = Error;

    fn try_from(r: ModelRecord) -> Result<Self> {
        let layers = r
            .layers
            .into_iter()
            .map(|l| {
                check_len(l.rows, l.bias.len())?;
                let weights = Array2::from_shape_vec((l.rows, l.cols), l.weights)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                Ok(Dense {
                    weights,
                    bias: Array1::from(l.bias),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let model = MlpModel {
            layers,
            lower: r.lower,
            upper: r.upper,
        };
        model.check_shapes()?;
        Ok(model)
    }
}

/// Activations saved by a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input of each layer (`B × in`).
    inputs: Vec<Array2<f64>>,
    /// Pre-activations of the hidden layers (`B × 256`).
    hidden_pre: Vec<Array2<f64>>,
    /// Logistic outputs (`B × n`).
    squashed: Array2<f64>,
}

/// Gradients with the same layout as the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGradients {
    pub layers: Vec<Dense>,
}

impl ParamGradients {
    pub fn flatten(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }
}

fn flatten_layers(layers: &[Dense]) -> Vec<f64> {
    let mut out = Vec::new();
    for l in layers {
        out.extend(l.weights.iter());
        out.extend(l.bias.iter());
    }
    out
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl MlpModel {
    /// Zero-initialized model; every output is the box midpoint.
    pub fn zeros(m: usize, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        let n = lower.len();
        let mut sizes = vec![m];
        sizes.extend([HIDDEN_WIDTH; HIDDEN_LAYERS]);
        sizes.push(n);
        let layers = sizes.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect();
        Ok(Self {
            layers,
            lower,
            upper,
        })
    }

    /// Fan-in scaled uniform weights `U(−1/√in, 1/√in)`, zero biases.
    pub fn init(m: usize, lower: Vec<f64>, upper: Vec<f64>, seed: u64) -> Result<Self> {
        let mut model = Self::zeros(m, lower, upper)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for layer in &mut model.layers {
            let bound = 1.0 / (layer.inputs() as f64).sqrt();
            layer
                .weights
                .iter_mut()
                .for_each(|w| *w = rng.gen_range(-bound..bound));
        }
        Ok(model)
    }

    fn check_shapes(&self) -> Result<()> {
        if self.layers.len() != HIDDEN_LAYERS + 1 {
            return Err(Error::Parse(format!(
                "expected {} layers, found {}",
                HIDDEN_LAYERS + 1,
                self.layers.len()
            )));
        }
        for w in self.layers.windows(2) {
            check_len(w[0].outputs(), w[1].inputs())?;
        }
        check_len(self.lower.len(), self.upper.len())?;
        check_len(self.lower.len(), self.layers[HIDDEN_LAYERS].outputs())
    }

    pub fn num_objectives(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn num_variables(&self) -> usize {
        self.lower.len()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    pub fn flatten(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }

    /// Overwrites parameters from a flat vector in [`MlpModel::flatten`] order.
    pub fn set_flat(&mut self, theta: &[f64]) -> Result<()> {
        check_len(self.parameter_count(), theta.len())?;
        let mut it = theta.iter().copied();
        for l in &mut self.layers {
            l.weights.iter_mut().for_each(|w| *w = it.next().expect("length checked"));
            l.bias.iter_mut().for_each(|b| *b = it.next().expect("length checked"));
        }
        Ok(())
    }

    /// Forward pass for a batch of preferences (`B × m`), returning decisions
    /// (`B × n`) and the cache needed by [`MlpModel::backward`].
    pub fn forward_batch(&self, prefs: &Array2<f64>) -> Result<(Array2<f64>, ForwardCache)> {
        check_len(self.num_objectives(), prefs.ncols())?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut hidden_pre = Vec::with_capacity(HIDDEN_LAYERS);
        let mut a = prefs.clone();
        for layer in &self.layers[..HIDDEN_LAYERS] {
            let z = a.dot(&layer.weights.t()) + &layer.bias;
            inputs.push(a);
            a = z.mapv(|v| v.max(0.0));
            hidden_pre.push(z);
        }
        let out = &self.layers[HIDDEN_LAYERS];
        let z = a.dot(&out.weights.t()) + &out.bias;
        inputs.push(a);
        let squashed = z.mapv(logistic);
        let mut x = squashed.clone();
        for mut row in x.rows_mut() {
            for ((v, lo), hi) in row.iter_mut().zip(&self.lower).zip(&self.upper) {
                // clamp guards the last ulp of the affine map
                *v = (lo + (hi - lo) * *v).clamp(*lo, *hi);
            }
        }
        Ok((
            x,
            ForwardCache {
                inputs,
                hidden_pre,
                squashed,
            },
        ))
    }

    /// Decision vector for a single preference.
    pub fn forward(&self, lambda: &Preference) -> Result<(Vec<f64>, ForwardCache)> {
        let prefs = Array2::from_shape_vec((1, lambda.len()), lambda.values().to_vec())
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let (x, cache) = self.forward_batch(&prefs)?;
        Ok((x.row(0).to_vec(), cache))
    }

    /// Reverse-mode gradient of `Σ_b upstream[b] · x_b` with respect to all
    /// parameters. Rectifier units with pre-activation exactly zero pass no
    /// gradient.
    pub fn backward(&self, cache: &ForwardCache, upstream: &Array2<f64>) -> Result<ParamGradients> {
        if upstream.dim() != cache.squashed.dim() {
            return Err(Error::DimensionMismatch {
                expected: cache.squashed.len(),
                found: upstream.len(),
            });
        }
        let span: Array1<f64> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .collect();
        // d x / d z = span · s (1 − s)
        let mut delta = upstream.clone();
        Zip::from(delta.rows_mut())
            .and(cache.squashed.rows())
            .for_each(|mut d, s| {
                Zip::from(&mut d).and(&s).and(&span).for_each(|d, &s, &w| {
                    *d *= w * s * (1.0 - s);
                });
            });

        let mut grads: Vec<Dense> = Vec::with_capacity(self.layers.len());
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let input = &cache.inputs[k];
            let weights = delta.t().dot(input);
            let bias = delta.sum_axis(Axis(0));
            grads.push(Dense { weights, bias });
            if k == 0 {
                break;
            }
            let mut back = delta.dot(&layer.weights);
            Zip::from(&mut back)
                .and(&cache.hidden_pre[k - 1])
                .for_each(|g, &z| {
                    if z <= 0.0 {
                        *g = 0.0;
                    }
                });
            delta = back;
        }
        grads.reverse();
        Ok(ParamGradients { layers: grads })
    }
}
