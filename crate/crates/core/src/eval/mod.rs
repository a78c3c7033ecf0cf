//! Cross-validated evaluation of the classifier suite on principal-component
//! inputs, plus null-data audits of information leakage.

mod audit;
mod metrics;
mod report;

pub use audit::{leakage_audit, optimism_curve, LeakageAudit, OptimismCurve, OptimismPoint, Pipeline, PipelineSummary};
pub use metrics::{compute_accuracy, compute_auc};
pub use report::{Cell, ClassifierRow, EvalReport, Prediction, LEAKY_STAMP};

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{LabeledDataset, Trainer};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, InstanceMeta};
use crate::rng::{derive_seed, seeded};
use crate::signal::ClassLabel;
use crate::space::{apply_scaler, explained_variance, fit_pca, fit_scaler, project, PcaModel, Scaler};

/// Seed stream reserved for fold assignment.
const FOLD_STREAM: u64 = 0xF01D;
/// Seed stream reserved for classifier training.
const TRAIN_STREAM: u64 = 0x7EA1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    ByInstance,
    BySubject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Scaler and PCA fitted on each training fold only.
    InsideFolds,
    /// Scaler and PCA fitted once on every row, test rows included.
    WholeDataset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub grouping: Grouping,
    pub placement: Placement,
    pub pc_counts: Vec<usize>,
    pub restandardize_pcs: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: 42,
            grouping: Grouping::BySubject,
            placement: Placement::InsideFolds,
            pc_counts: vec![1, 2, 3, 10],
            restandardize_pcs: true,
        }
    }
}

impl CvConfig {
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Config(format!("need at least 2 folds, got {}", self.folds)));
        }
        if self.pc_counts.is_empty() {
            return Err(Error::Config("no principal-component counts given".into()));
        }
        for (i, &m) in self.pc_counts.iter().enumerate() {
            if m == 0 || m > n_features {
                return Err(Error::Config(format!(
                    "principal-component count {m} outside 1..={n_features}"
                )));
            }
            if self.pc_counts[..i].contains(&m) {
                return Err(Error::Config(format!("principal-component count {m} repeated")));
            }
        }
        Ok(())
    }

    pub fn is_leaky(&self) -> bool {
        self.placement == Placement::WholeDataset
    }
}

/// Test-index sets for `config.folds` folds. Groups (subjects, or single
/// instances) are shuffled within each class and dealt round-robin, the
/// dealing position carrying over from Patient groups to Control groups.
pub fn stratified_folds(meta: &[InstanceMeta], config: &CvConfig) -> Result<Vec<Vec<usize>>> {
    let mut groups: Vec<(ClassLabel, Vec<usize>)> = Vec::new();
    match config.grouping {
        Grouping::ByInstance => groups.extend(meta.iter().enumerate().map(|(i, m)| (m.label, vec![i]))),
        Grouping::BySubject => {
            let mut index: HashMap<&str, usize> = HashMap::new();
            for (i, m) in meta.iter().enumerate() {
                match index.get(m.subject_id.as_str()) {
                    Some(&g) => {
                        if groups[g].0 != m.label {
                            return Err(Error::Contract(format!(
                                "subject {} carries both class labels",
                                m.subject_id
                            )));
                        }
                        groups[g].1.push(i);
                    }
                    None => {
                        index.insert(&m.subject_id, groups.len());
                        groups.push((m.label, vec![i]));
                    }
                }
            }
        }
    }
    if config.folds < 2 || config.folds > groups.len() {
        return Err(Error::Config(format!(
            "cannot make {} folds from {} groups",
            config.folds,
            groups.len()
        )));
    }
    let mut rng = seeded(derive_seed(config.seed, &[FOLD_STREAM]));
    let mut folds = vec![Vec::new(); config.folds];
    let mut next = 0;
    for class in [ClassLabel::Patient, ClassLabel::Control] {
        let mut members: Vec<&Vec<usize>> = groups.iter().filter(|g| g.0 == class).map(|g| &g.1).collect();
        members.shuffle(&mut rng);
        for g in members {
            folds[next].extend_from_slice(g);
            next = (next + 1) % config.folds;
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Scaler, PCA and optional per-component re-standardization, fitted on one
/// set of rows and applied to others.
#[derive(Debug, Clone)]
struct Preprocessor {
    scaler: Scaler,
    pca: PcaModel,
    pc_scaler: Option<Scaler>,
    n_components: usize,
}

impl Preprocessor {
    fn fit(rows: &FeatureMatrix, n_components: usize, restandardize: bool) -> Result<Self> {
        let scaler = fit_scaler(rows)?;
        let scaled = apply_scaler(&scaler, rows)?;
        let pca = fit_pca(&scaled)?;
        let pc_scaler = if restandardize {
            Some(fit_scaler(&project(&pca, &scaled, n_components)?)?)
        } else {
            None
        };
        Ok(Self { scaler, pca, pc_scaler, n_components })
    }

    fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        let scores = self.pca.project_row(&self.scaler.transform_row(row), self.n_components);
        match &self.pc_scaler {
            Some(s) => s.transform_row(&scores),
            None => scores,
        }
    }
}

struct FoldOutput {
    explained: Vec<f64>,
    /// Indexed `[classifier][pc]`, one entry per test row.
    scores: Vec<Vec<Vec<(f64, ClassLabel)>>>,
}

fn complement(n: usize, test: &[usize]) -> Vec<usize> {
    let mut in_test = vec![false; n];
    test.iter().for_each(|&i| in_test[i] = true);
    (0..n).filter(|&i| !in_test[i]).collect()
}

fn run_fold(
    features: &FeatureMatrix,
    config: &CvConfig,
    trainers: &[&dyn Trainer],
    global: Option<&Preprocessor>,
    fold: usize,
    test: &[usize],
) -> Result<FoldOutput> {
    let m_max = *config.pc_counts.iter().max().expect("validated nonempty");
    let train = complement(features.n_rows(), test);
    let train_rows = features.subset(&train);
    let local;
    let prep = match global {
        Some(p) => p,
        None => {
            local = Preprocessor::fit(&train_rows, m_max, config.restandardize_pcs)?;
            &local
        }
    };
    let explained = config
        .pc_counts
        .iter()
        .map(|&m| explained_variance(&prep.pca, m))
        .collect::<Result<Vec<_>>>()?;

    // Only the fitted preprocessor touches test rows from here on.
    let train_x: Vec<Vec<f64>> = train_rows.rows().iter().map(|r| prep.transform_row(r)).collect();
    let test_x: Vec<Vec<f64>> = test.iter().map(|&i| prep.transform_row(&features.rows()[i])).collect();
    let train_labels = train_rows.labels();

    let mut scores = Vec::with_capacity(trainers.len());
    for (c, trainer) in trainers.iter().enumerate() {
        let mut per_pc = Vec::with_capacity(config.pc_counts.len());
        for &m in &config.pc_counts {
            let names = (1..=m).map(|j| format!("PC{j}")).collect();
            let rows = train_x.iter().map(|r| r[..m].to_vec()).collect();
            let data = LabeledDataset::new(rows, train_labels.clone(), names)?;
            let seed = derive_seed(config.seed, &[TRAIN_STREAM, fold as u64, c as u64, m as u64]);
            let model = trainer.train(&data, seed)?;
            let out = test_x
                .iter()
                .map(|x| Ok((model.predict_score(&x[..m])?, model.predict_label(&x[..m])?)))
                .collect::<Result<Vec<_>>>()?;
            per_pc.push(out);
        }
        scores.push(per_pc);
    }
    Ok(FoldOutput { explained, scores })
}

/// K-fold cross-validation of every trainer at every principal-component
/// count. Accuracy and AUC pool the test predictions of all folds.
pub fn run_cv(features: &FeatureMatrix, config: &CvConfig, trainers: &[&dyn Trainer]) -> Result<EvalReport> {
    config.validate(features.n_features())?;
    if trainers.is_empty() {
        return Err(Error::Config("no classifiers selected".into()));
    }
    let folds = stratified_folds(features.meta(), config)?;
    let m_max = *config.pc_counts.iter().max().expect("validated nonempty");
    let global = match config.placement {
        Placement::WholeDataset => Some(Preprocessor::fit(features, m_max, config.restandardize_pcs)?),
        Placement::InsideFolds => None,
    };

    let outputs = folds
        .par_iter()
        .enumerate()
        .map(|(f, test)| {
            run_fold(features, config, trainers, global.as_ref(), f, test)
                .map_err(|e| Error::Fold { fold: f, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    let n_pcs = config.pc_counts.len();
    let explained_variance: Vec<f64> = (0..n_pcs)
        .map(|p| outputs.iter().map(|o| o.explained[p]).sum::<f64>() / outputs.len() as f64)
        .collect();

    let truth = features.labels();
    let mut predictions = Vec::new();
    for (f, (test, out)) in folds.iter().zip(&outputs).enumerate() {
        for (c, trainer) in trainers.iter().enumerate() {
            for (p, &m) in config.pc_counts.iter().enumerate() {
                for (&i, &(score, predicted)) in test.iter().zip(&out.scores[c][p]) {
                    predictions.push(Prediction {
                        fold: f,
                        classifier: trainer.name().to_string(),
                        pc_count: m,
                        instance: i,
                        subject_id: features.meta()[i].subject_id.clone(),
                        truth: truth[i],
                        score,
                        predicted,
                    });
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(trainers.len());
    for (c, trainer) in trainers.iter().enumerate() {
        let mut cells = Vec::with_capacity(n_pcs);
        for (p, &m) in config.pc_counts.iter().enumerate() {
            let mut outcomes = Vec::new();
            let mut scores = Vec::new();
            let mut labels = Vec::new();
            for (test, out) in folds.iter().zip(&outputs) {
                for (&i, &(score, predicted)) in test.iter().zip(&out.scores[c][p]) {
                    outcomes.push((predicted, truth[i]));
                    scores.push(score);
                    labels.push(truth[i]);
                }
            }
            cells.push(Cell {
                pc_count: m,
                correct: outcomes.iter().filter(|(a, b)| a == b).count(),
                total: outcomes.len(),
                accuracy: compute_accuracy(&outcomes)?,
                auc: compute_auc(&scores, &labels)?,
            });
        }
        rows.push(ClassifierRow {
            classifier: trainer.name().to_string(),
            display_name: trainer.display_name().to_string(),
            cells,
        });
    }
    let average_accuracy = (0..n_pcs)
        .map(|p| rows.iter().map(|r| r.cells[p].accuracy).sum::<f64>() / rows.len() as f64)
        .collect();
    let n_patients = truth.iter().filter(|l| l.is_patient()).count();

    Ok(EvalReport {
        stamp: config.is_leaky().then(|| LEAKY_STAMP.to_string()),
        config: config.clone(),
        n_instances: features.n_rows(),
        n_patients,
        n_controls: features.n_rows() - n_patients,
        n_features: features.n_features(),
        pc_counts: config.pc_counts.clone(),
        classifiers: rows,
        average_accuracy,
        explained_variance,
        folds,
        predictions,
    })
}
