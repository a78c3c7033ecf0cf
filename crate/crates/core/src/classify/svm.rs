//! Soft-margin SVM solved in the dual by sequential minimal optimization.
//!
//! The dual `min 1/2 a'Qa - e'a` subject to `y'a = 0`, `0 <= a_i <= C`,
//! with `Q_ij = y_i y_j K(x_i, x_j)`, is optimized two multipliers at a time
//! using the maximal-violating-pair working set. The bias averages
//! `c_i - sum_j a_j c_j K(x_j, x_i)` over the margin support vectors
//! (`0 < a_i < C`), or over all support vectors when none is free.

use serde::{Deserialize, Serialize};

use super::{Family, LabeledDataset, ModelParams, Predictor, TrainedModel};
use crate::error::{Error, Result};

pub const SVM_C: f64 = 1.0;
pub const KKT_TOLERANCE: f64 = 1e-3;
pub const ALPHA_EPSILON: f64 = 1e-12;
pub const MAX_SMO_ITERATIONS: usize = 1_000_000;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `x'y`
    Linear,
    /// `(x'y)^2`, homogeneous.
    Poly2,
}

impl Kernel {
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        match self {
            Kernel::Linear => dot,
            Kernel::Poly2 => dot * dot,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub c: f64,
    pub support_vectors: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    /// +1 for Patient, -1 for Control.
    pub labels: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

impl SvmModel {
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(self.alphas.iter().zip(&self.labels))
            .map(|(sv, (a, y))| a * y * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

impl Predictor for SvmModel {
    fn score(&self, x: &[f64]) -> f64 {
        self.decision_value(x)
    }

    fn threshold(&self) -> f64 {
        0.0
    }
}

/// Dual solution over the full training set.
#[derive(Debug, Clone)]
pub struct SmoSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

pub fn solve_smo(kernel_matrix: &[Vec<f64>], y: &[f64], c: f64) -> Result<SmoSolution> {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * kernel_matrix[i][j];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    loop {
        let mut i = None;
        let mut g_max = f64::NEG_INFINITY;
        let mut j = None;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > g_max {
                g_max = v;
                i = Some(t);
            }
            if in_low(alpha[t], y[t]) && v < g_min {
                g_min = v;
                j = Some(t);
            }
        }
        let (Some(i), Some(j)) = (i, j) else { break };
        if g_max - g_min < KKT_TOLERANCE {
            break;
        }
        if iterations >= MAX_SMO_ITERATIONS {
            return Err(Error::Training(format!(
                "SMO did not converge within {MAX_SMO_ITERATIONS} iterations"
            )));
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (q(i, i) + q(j, j) + 2.0 * q(i, j)).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (q(i, i) + q(j, j) - 2.0 * q(i, j)).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    for a in alpha.iter_mut() {
        if *a < ALPHA_EPSILON {
            *a = 0.0;
        } else if *a > c - ALPHA_EPSILON {
            *a = c;
        }
    }

    let output = |i: usize| -> f64 { (0..n).map(|j| alpha[j] * y[j] * kernel_matrix[j][i]).sum() };
    let free: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0.0 && alpha[i] < c).collect();
    let support: Vec<usize> = if free.is_empty() {
        (0..n).filter(|&i| alpha[i] > 0.0).collect()
    } else {
        free
    };
    let bias = if support.is_empty() {
        0.0
    } else {
        support.iter().map(|&i| y[i] - output(i)).sum::<f64>() / support.len() as f64
    };
    Ok(SmoSolution { alphas: alpha, bias, iterations })
}

/// Trains with `C = 1`; Patient maps to +1 and Control to -1.
pub fn train_svm(data: &LabeledDataset, kernel: Kernel) -> Result<TrainedModel> {
    data.require_both_classes(1, "SVM")?;
    let rows = data.rows();
    let y: Vec<f64> = data.labels().iter().map(|l| if l.is_patient() { 1.0 } else { -1.0 }).collect();
    let gram: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| kernel.eval(a, b)).collect())
        .collect();
    let sol = solve_smo(&gram, &y, SVM_C)?;

    let keep: Vec<usize> = (0..rows.len()).filter(|&i| sol.alphas[i] > 0.0).collect();
    let model = SvmModel {
        kernel,
        c: SVM_C,
        support_vectors: keep.iter().map(|&i| rows[i].clone()).collect(),
        alphas: keep.iter().map(|&i| sol.alphas[i]).collect(),
        labels: keep.iter().map(|&i| y[i]).collect(),
        bias: sol.bias,
        iterations: sol.iterations,
    };
    let family = match kernel {
        Kernel::Linear => Family::SvmLinear,
        Kernel::Poly2 => Family::SvmPoly2,
    };
    Ok(TrainedModel::new(family, data, None, ModelParams::Svm(model)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::ClassLabel::{Control, Patient};

    fn params(model: &TrainedModel) -> &SvmModel {
        match &model.params {
            ModelParams::Svm(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn kernels() {
        assert_eq!(Kernel::Linear.eval(&[1.0, 2.0], &[3.0, -1.0]), 1.0);
        assert_eq!(Kernel::Poly2.eval(&[1.0, 2.0], &[3.0, 1.0]), 25.0);
    }

    #[test]
    fn two_point_problem() {
        let data = LabeledDataset::from_rows(vec![vec![-1.0], vec![1.0]], vec![Control, Patient]).unwrap();
        let model = train_svm(&data, Kernel::Linear).unwrap();
        let p = params(&model);
        assert_eq!(p.alphas.len(), 2);
        assert!(p.alphas.iter().all(|a| (a - 0.5).abs() < 1e-12));
        assert!(p.bias.abs() < 1e-12);
        assert!(model.predict_score(&[0.0]).unwrap().abs() < 1e-12);
        assert!((model.predict_score(&[1.0]).unwrap() - 1.0).abs() < 1e-6);
        assert!((model.predict_score(&[-1.0]).unwrap() + 1.0).abs() < 1e-6);
        assert_eq!(model.predict_label(&[0.2]).unwrap(), Patient);
        assert_eq!(model.predict_label(&[0.0]).unwrap(), Control);
    }

    #[test]
    fn kkt_conditions_on_overlapping_data() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.71).sin() * 1.5, (t * 0.23).cos()]
            })
            .collect();
        let labels: Vec<_> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| if r[0] + 0.3 * r[1] + if i % 7 == 0 { 1.0 } else { 0.0 } > 0.2 { Patient } else { Control })
            .collect();
        let data = LabeledDataset::from_rows(rows, labels).unwrap();
        for kernel in [Kernel::Linear, Kernel::Poly2] {
            let model = train_svm(&data, kernel).unwrap();
            let p = params(&model);
            let balance: f64 = p.alphas.iter().zip(&p.labels).map(|(a, y)| a * y).sum();
            assert!(balance.abs() < 1e-8);
            assert!(p.alphas.iter().all(|&a| a > 0.0 && a <= SVM_C));
            for ((sv, a), y) in p.support_vectors.iter().zip(&p.alphas).zip(&p.labels) {
                if *a < SVM_C {
                    let margin = y * p.decision_value(sv);
                    assert!((margin - 1.0).abs() <= KKT_TOLERANCE, "margin {margin}");
                }
            }
        }
    }
}
