//! One-hidden-layer sigmoid perceptron trained by full-batch
//! backpropagation with momentum on the summed squared error
//! `E = 1/2 sum (o - t)^2`, with `t = 1` for Patient.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sigmoid, Family, LabeledDataset, ModelParams, Predictor, TrainedModel};
use crate::error::{Error, Result};
use crate::rng::seeded;

pub const MLP_EPOCHS: usize = 500;
pub const MLP_LEARNING_RATE: f64 = 0.3;
pub const MLP_MOMENTUM: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlpConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self { epochs: MLP_EPOCHS, learning_rate: MLP_LEARNING_RATE, momentum: MLP_MOMENTUM }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// One row per hidden unit: input weights followed by the bias.
    pub hidden: Vec<Vec<f64>>,
    /// Hidden-to-output weights followed by the output bias.
    pub output: Vec<f64>,
}

impl MlpModel {
    /// `ceil((k + 1) / 2)` hidden units, weights uniform in (-0.5, 0.5).
    pub fn initialize(n_inputs: usize, seed: u64) -> Self {
        let n_hidden = (n_inputs + 2) / 2;
        let mut rng = seeded(seed);
        let mut draw = || rng.random_range(-0.5..0.5);
        let hidden = (0..n_hidden).map(|_| (0..=n_inputs).map(|_| draw()).collect()).collect();
        let output = (0..=n_hidden).map(|_| draw()).collect();
        Self { hidden, output }
    }

    pub fn n_inputs(&self) -> usize {
        self.hidden[0].len() - 1
    }

    pub fn n_hidden(&self) -> usize {
        self.hidden.len()
    }

    fn forward(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let k = self.n_inputs();
        let h: Vec<f64> = self
            .hidden
            .iter()
            .map(|w| sigmoid(w[k] + w[..k].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()))
            .collect();
        let nh = h.len();
        let o = sigmoid(self.output[nh] + self.output[..nh].iter().zip(&h).map(|(a, b)| a * b).sum::<f64>());
        (h, o)
    }

    pub fn loss(&self, data: &LabeledDataset) -> f64 {
        data.rows()
            .iter()
            .zip(data.targets())
            .map(|(x, t)| {
                let o = self.forward(x).1;
                0.5 * (o - t) * (o - t)
            })
            .sum()
    }

    /// Parameters in the order hidden rows, then output.
    pub fn flat_params(&self) -> Vec<f64> {
        self.hidden.iter().flatten().chain(&self.output).copied().collect()
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        let mut it = params.iter().copied();
        for w in self.hidden.iter_mut().flatten().chain(self.output.iter_mut()) {
            *w = it.next().expect("parameter count matches");
        }
    }

    /// Analytic gradient of [`MlpModel::loss`], laid out like
    /// [`MlpModel::flat_params`].
    pub fn gradient(&self, data: &LabeledDataset) -> Vec<f64> {
        let k = self.n_inputs();
        let nh = self.n_hidden();
        let mut g_hidden = vec![vec![0.0; k + 1]; nh];
        let mut g_output = vec![0.0; nh + 1];
        for (x, t) in data.rows().iter().zip(data.targets()) {
            let (h, o) = self.forward(x);
            let delta_o = (o - t) * o * (1.0 - o);
            for j in 0..nh {
                g_output[j] += delta_o * h[j];
                let delta_h = delta_o * self.output[j] * h[j] * (1.0 - h[j]);
                for i in 0..k {
                    g_hidden[j][i] += delta_h * x[i];
                }
                g_hidden[j][k] += delta_h;
            }
            g_output[nh] += delta_o;
        }
        g_hidden.into_iter().flatten().chain(g_output).collect()
    }
}

impl Predictor for MlpModel {
    fn score(&self, x: &[f64]) -> f64 {
        self.forward(x).1
    }
}

pub fn train_mlp(data: &LabeledDataset, seed: u64) -> Result<TrainedModel> {
    train_mlp_with(data, seed, &MlpConfig::default())
}

pub fn train_mlp_with(data: &LabeledDataset, seed: u64, config: &MlpConfig) -> Result<TrainedModel> {
    if data.n_features() == 0 {
        return Err(Error::Training("perceptron needs at least one feature".into()));
    }
    let mut model = MlpModel::initialize(data.n_features(), seed);
    let mut params = model.flat_params();
    let mut velocity = vec![0.0; params.len()];
    for _ in 0..config.epochs {
        let grad = model.gradient(data);
        for ((p, v), g) in params.iter_mut().zip(velocity.iter_mut()).zip(&grad) {
            *v = -config.learning_rate * g + config.momentum * *v;
            *p += *v;
        }
        model.set_flat_params(&params);
    }
    Ok(TrainedModel::new(Family::Mlp, data, Some(seed), ModelParams::Mlp(model)))
}
