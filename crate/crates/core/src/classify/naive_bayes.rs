//! Gaussian naive Bayes. Scores are computed in log space.

use serde::{Deserialize, Serialize};

use super::{Family, LabeledDataset, ModelParams, Predictor, TrainedModel};
use crate::error::Result;

pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Index 0 is Patient, index 1 is Control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

impl NaiveBayesModel {
    fn log_joint(&self, class: usize, x: &[f64]) -> f64 {
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();
        self.priors[class].ln()
            + x.iter()
                .zip(self.means[class].iter().zip(&self.variances[class]))
                .map(|(v, (m, var))| -0.5 * (ln_2pi + var.ln() + (v - m) * (v - m) / var))
                .sum::<f64>()
    }

    /// Posterior probability of each class, `[patient, control]`.
    pub fn posterior(&self, x: &[f64]) -> [f64; 2] {
        let lp = self.log_joint(0, x);
        let lc = self.log_joint(1, x);
        let p = super::sigmoid(lp - lc);
        [p, 1.0 - p]
    }
}

impl Predictor for NaiveBayesModel {
    fn score(&self, x: &[f64]) -> f64 {
        self.posterior(x)[0]
    }
}

/// Priors are class frequencies; per-class feature variances use divisor
/// `N_c - 1` and are floored at [`VARIANCE_FLOOR`].
pub fn train_naive_bayes(data: &LabeledDataset) -> Result<TrainedModel> {
    data.require_both_classes(2, "naive Bayes")?;
    let k = data.n_features();
    let n = data.len() as f64;
    let mut priors = [0.0; 2];
    let mut means = [vec![0.0; k], vec![0.0; k]];
    let mut variances = [vec![0.0; k], vec![0.0; k]];
    for (class, want_patient) in [(0, true), (1, false)] {
        let rows: Vec<&Vec<f64>> = data
            .rows()
            .iter()
            .zip(data.labels())
            .filter(|(_, l)| l.is_patient() == want_patient)
            .map(|(r, _)| r)
            .collect();
        let nc = rows.len() as f64;
        priors[class] = nc / n;
        for j in 0..k {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / nc;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (nc - 1.0);
            means[class][j] = mean;
            variances[class][j] = var.max(VARIANCE_FLOOR);
        }
    }
    Ok(TrainedModel::new(
        Family::NaiveBayes,
        data,
        None,
        ModelParams::NaiveBayes(NaiveBayesModel { priors, means, variances }),
    ))
}
