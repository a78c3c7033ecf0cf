//! Logistic regression fitted by damped Newton iterations (IRLS) on the
//! ridge-penalized log-likelihood. The intercept is not penalized.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{sigmoid, Family, LabeledDataset, ModelParams, Predictor, TrainedModel};
use crate::error::Result;

pub const RIDGE: f64 = 1e-8;
pub const MAX_NEWTON_ITERATIONS: usize = 200;
pub const GRADIENT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// `beta[0]` is the intercept.
    pub beta: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
}

impl LogisticModel {
    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        self.beta[0] + self.beta[1..].iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
    }
}

impl Predictor for LogisticModel {
    fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.linear_predictor(x))
    }
}

fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

struct Problem<'a> {
    design: &'a DMatrix<f64>,
    targets: &'a DVector<f64>,
}

impl Problem<'_> {
    fn penalty_mask(&self) -> DVector<f64> {
        DVector::from_fn(self.design.ncols(), |j, _| if j == 0 { 0.0 } else { RIDGE })
    }

    fn objective(&self, beta: &DVector<f64>) -> f64 {
        let eta = self.design * beta;
        let nll: f64 = eta
            .iter()
            .zip(self.targets.iter())
            .map(|(e, y)| softplus(*e) - y * e)
            .sum();
        let pen: f64 = beta.iter().skip(1).map(|b| b * b).sum::<f64>() * RIDGE * 0.5;
        nll + pen
    }

    fn gradient_hessian(&self, beta: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let eta = self.design * beta;
        let p = eta.map(sigmoid);
        let mask = self.penalty_mask();
        let grad = self.design.transpose() * (&p - self.targets) + mask.component_mul(beta);
        let w = p.map(|v| v * (1.0 - v));
        let mut weighted = self.design.clone();
        for (i, mut row) in weighted.row_iter_mut().enumerate() {
            row *= w[i];
        }
        let mut hess = self.design.transpose() * weighted;
        for j in 0..hess.nrows() {
            hess[(j, j)] += mask[j];
        }
        (grad, hess)
    }
}

fn newton_direction(hess: DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let rhs = -grad;
    if let Some(chol) = hess.clone().cholesky() {
        return chol.solve(&rhs);
    }
    hess.svd(true, true)
        .solve(&rhs, 1e-14)
        .unwrap_or_else(|_| rhs.clone())
}

/// Fits `beta` until the gradient norm drops below [`GRADIENT_TOLERANCE`]
/// or [`MAX_NEWTON_ITERATIONS`] is reached.
pub fn train_logistic(data: &LabeledDataset) -> Result<TrainedModel> {
    data.require_both_classes(1, "logistic regression")?;
    let k = data.n_features();
    let design = DMatrix::from_fn(data.len(), k + 1, |i, j| if j == 0 { 1.0 } else { data.rows()[i][j - 1] });
    let targets = DVector::from_vec(data.targets());
    let problem = Problem { design: &design, targets: &targets };

    let mut beta = DVector::zeros(k + 1);
    let mut value = problem.objective(&beta);
    let mut iterations = 0;
    let (mut grad, mut hess) = problem.gradient_hessian(&beta);
    while grad.norm() >= GRADIENT_TOLERANCE && iterations < MAX_NEWTON_ITERATIONS {
        iterations += 1;
        let dir = newton_direction(hess, &grad);
        let slope = grad.dot(&dir);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = &beta + &dir * step;
            let v = problem.objective(&candidate);
            if v <= value + 1e-4 * step * slope {
                beta = candidate;
                value = v;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        (grad, hess) = problem.gradient_hessian(&beta);
        if !accepted {
            break;
        }
    }

    Ok(TrainedModel::new(
        Family::Logistic,
        data,
        None,
        ModelParams::Logistic(LogisticModel {
            beta: beta.iter().copied().collect(),
            iterations,
            gradient_norm: grad.norm(),
        }),
    ))
}
