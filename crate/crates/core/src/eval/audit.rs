//! Monte-Carlo audits on pure-noise data, where every classifier's true
//! accuracy is 50% and anything above that is optimism.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compute_accuracy, stratified_folds, CvConfig, Grouping, Placement};
use crate::classify::{train_naive_bayes, LabeledDataset};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, InstanceMeta};
use crate::rng::{derive_seed, seeded};
use crate::signal::ClassLabel;
use crate::space::{apply_scaler, fit_pca, fit_scaler, project};

/// Features kept by the ranking step of each pipeline.
pub const SELECTED_FEATURES: usize = 5;
pub const AUDIT_FOLDS: usize = 10;
pub const AUDIT_CLASSIFIER: &str = "naive-bayes";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Scaling and feature ranking fitted on each training fold.
    Proper,
    /// Scaling and PCA fitted on all rows before the folds are drawn.
    PreprocessingLeak,
    /// Features ranked by class-mean gap on all rows before the folds are drawn.
    SelectionLeak,
}

impl Pipeline {
    pub const ALL: [Pipeline; 3] = [Pipeline::Proper, Pipeline::PreprocessingLeak, Pipeline::SelectionLeak];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub pipeline: Pipeline,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub accuracies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageAudit {
    pub n: usize,
    pub k: usize,
    pub seeds: usize,
    pub master_seed: u64,
    pub folds: usize,
    pub selected_features: usize,
    pub classifier: String,
    pub pipelines: Vec<PipelineSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimismPoint {
    pub n: usize,
    pub k: usize,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimismCurve {
    pub pipeline: Pipeline,
    pub seeds: usize,
    pub master_seed: u64,
    pub points: Vec<OptimismPoint>,
}

impl LeakageAudit {
    pub fn summary(&self, pipeline: Pipeline) -> &PipelineSummary {
        self.pipelines.iter().find(|p| p.pipeline == pipeline).expect("every pipeline is run")
    }
}

fn check(n: usize, k: usize, seeds: usize) -> Result<()> {
    if n < 10 {
        return Err(Error::Config(format!("audit needs at least 10 instances, got {n}")));
    }
    if k < 2 {
        return Err(Error::Config(format!("audit needs at least 2 features, got {k}")));
    }
    if seeds == 0 {
        return Err(Error::Config("audit needs at least one seed".into()));
    }
    Ok(())
}

/// Standard-normal features with exactly `n / 2` Patient labels in random
/// order.
fn null_matrix(n: usize, k: usize, seed: u64) -> FeatureMatrix {
    let mut rng = seeded(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..k).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let mut labels: Vec<ClassLabel> = (0..n)
        .map(|i| if i < n / 2 { ClassLabel::Patient } else { ClassLabel::Control })
        .collect();
    labels.shuffle(&mut rng);
    let meta = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| InstanceMeta { subject_id: format!("N{i:05}"), label })
        .collect();
    let names = (1..=k).map(|j| format!("f{j}")).collect();
    FeatureMatrix::new(names, rows, meta).expect("finite by construction")
}

/// Indices of the `count` features with the largest standardized class-mean
/// gap `|mean_P - mean_C| / sd` over `rows`; ties keep the lower index.
fn top_features(matrix: &FeatureMatrix, rows: &[usize], count: usize) -> Vec<usize> {
    let k = matrix.n_features();
    let data = matrix.rows();
    let meta = matrix.meta();
    let mut gaps: Vec<(usize, f64)> = (0..k)
        .map(|j| {
            let (mut sp, mut np, mut sc, mut nc, mut s, mut ss) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for &i in rows {
                let v = data[i][j];
                if meta[i].label.is_patient() {
                    sp += v;
                    np += 1.0;
                } else {
                    sc += v;
                    nc += 1.0;
                }
                s += v;
                ss += v * v;
            }
            let n = rows.len() as f64;
            let var = (ss - s * s / n) / (n - 1.0);
            let gap = if np > 0.0 && nc > 0.0 && var > 0.0 {
                (sp / np - sc / nc).abs() / var.sqrt()
            } else {
                0.0
            };
            (j, gap)
        })
        .collect();
    gaps.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    gaps.into_iter().take(count).map(|(j, _)| j).collect()
}

/// Pooled cross-validated accuracy of one pipeline on one null replicate.
fn replicate_accuracy(matrix: &FeatureMatrix, pipeline: Pipeline, seed: u64) -> Result<f64> {
    let n = matrix.n_rows();
    let keep = SELECTED_FEATURES.min(matrix.n_features());
    let cv = CvConfig {
        folds: AUDIT_FOLDS.min(n),
        seed,
        grouping: Grouping::ByInstance,
        placement: Placement::InsideFolds,
        pc_counts: vec![keep],
        restandardize_pcs: false,
    };
    let folds = stratified_folds(matrix.meta(), &cv)?;
    let all: Vec<usize> = (0..n).collect();

    let prepared = match pipeline {
        Pipeline::Proper => matrix.clone(),
        Pipeline::PreprocessingLeak => {
            let scaled = apply_scaler(&fit_scaler(matrix)?, matrix)?;
            project(&fit_pca(&scaled)?, &scaled, keep)?
        }
        Pipeline::SelectionLeak => matrix.select_features(&top_features(matrix, &all, keep)),
    };

    let labels = matrix.labels();
    let mut outcomes = Vec::with_capacity(n);
    for test in &folds {
        let train = super::complement(n, test);
        let columns = match pipeline {
            Pipeline::Proper => top_features(&prepared, &train, keep),
            _ => (0..prepared.n_features()).collect(),
        };
        let train_m = prepared.subset(&train).select_features(&columns);
        let scaler = fit_scaler(&train_m)?;
        let data = LabeledDataset::from_matrix(&apply_scaler(&scaler, &train_m)?)?;
        let model = train_naive_bayes(&data)?;
        for &i in test {
            let x: Vec<f64> = columns.iter().map(|&j| prepared.rows()[i][j]).collect();
            outcomes.push((model.predict_label(&scaler.transform_row(&x))?, labels[i]));
        }
    }
    compute_accuracy(&outcomes)
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

/// Replicate `s` of size `(n, k)` draws its data from
/// `derive_seed(master_seed, [n, k, s])`, shared by every pipeline and by
/// [`optimism_curve`].
fn replicates(n: usize, k: usize, seeds: usize, master_seed: u64, pipeline: Pipeline) -> Result<Vec<f64>> {
    (0..seeds as u64)
        .into_par_iter()
        .map(|s| {
            let seed = derive_seed(master_seed, &[n as u64, k as u64, s]);
            replicate_accuracy(&null_matrix(n, k, seed), pipeline, seed)
        })
        .collect()
}

/// Runs the proper, preprocessing-leak and selection-leak pipelines on
/// `seeds` pure-noise data sets of `n` instances and `k` features.
pub fn leakage_audit(n: usize, k: usize, seeds: usize, master_seed: u64) -> Result<LeakageAudit> {
    check(n, k, seeds)?;
    let pipelines = Pipeline::ALL
        .iter()
        .map(|&pipeline| {
            let accuracies = replicates(n, k, seeds, master_seed, pipeline)?;
            let (mean_accuracy, sd_accuracy) = mean_sd(&accuracies);
            Ok(PipelineSummary { pipeline, mean_accuracy, sd_accuracy, accuracies })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LeakageAudit {
        n,
        k,
        seeds,
        master_seed,
        folds: AUDIT_FOLDS.min(n),
        selected_features: SELECTED_FEATURES.min(k),
        classifier: AUDIT_CLASSIFIER.to_string(),
        pipelines,
    })
}

/// Mean selection-leak accuracy for every `(k, n)` combination, `k` outer.
pub fn optimism_curve(sizes: &[usize], ks: &[usize], seeds: usize, master_seed: u64) -> Result<OptimismCurve> {
    if sizes.is_empty() || ks.is_empty() {
        return Err(Error::Config("optimism curve needs at least one size and one feature count".into()));
    }
    let mut points = Vec::with_capacity(sizes.len() * ks.len());
    for &k in ks {
        for &n in sizes {
            check(n, k, seeds)?;
            let acc = replicates(n, k, seeds, master_seed, Pipeline::SelectionLeak)?;
            let (mean_accuracy, sd_accuracy) = mean_sd(&acc);
            points.push(OptimismPoint { n, k, mean_accuracy, sd_accuracy });
        }
    }
    Ok(OptimismCurve { pipeline: Pipeline::SelectionLeak, seeds, master_seed, points })
}
