//! Classifier families behind a shared train/predict contract.
//!
//! Each configuration implements [`Trainer`] and is registered by name in a
//! [`Registry`]; evaluation code selects trainers by name at runtime. Every
//! trainer produces a [`TrainedModel`], which predicts a Patient-confidence
//! score and a label and serializes to versioned JSON.

mod forest;
mod logistic;
mod mlp;
mod naive_bayes;
mod svm;
mod tree;

pub use forest::{feature_subset_size, train_random_forest, ForestModel, N_TREES};
pub use logistic::{train_logistic, LogisticModel};
pub use mlp::{train_mlp, train_mlp_with, MlpConfig, MlpModel, MLP_EPOCHS, MLP_LEARNING_RATE, MLP_MOMENTUM};
pub use naive_bayes::{train_naive_bayes, NaiveBayesModel};
pub use svm::{train_svm, Kernel, SvmModel, SVM_C};
pub use tree::{entropy_bits, information_gain, train_decision_tree, SplitCriterion, TreeModel, TreeOptions};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::signal::ClassLabel;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    rows: Vec<Vec<f64>>,
    labels: Vec<ClassLabel>,
    feature_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<ClassLabel>, feature_names: Vec<String>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Contract(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        if rows.is_empty() {
            return Err(Error::Contract("dataset has no rows".into()));
        }
        let k = feature_names.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != k {
                return Err(Error::Contract(format!("row {i} has {} features, expected {k}", r.len())));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::Degenerate(format!("row {i} contains non-finite features")));
            }
        }
        Ok(Self { rows, labels, feature_names })
    }

    /// Unnamed features `x1..xk`.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<ClassLabel>) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        Self::new(rows, labels, (1..=k).map(|j| format!("x{j}")).collect())
    }

    pub fn from_matrix(matrix: &FeatureMatrix) -> Result<Self> {
        Self::new(matrix.rows().to_vec(), matrix.labels(), matrix.feature_names().to_vec())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// `(patients, controls)`
    pub fn class_counts(&self) -> (usize, usize) {
        let p = self.labels.iter().filter(|l| l.is_patient()).count();
        (p, self.labels.len() - p)
    }

    pub(crate) fn require_both_classes(&self, min_each: usize, what: &str) -> Result<()> {
        let (p, c) = self.class_counts();
        if p < min_each || c < min_each {
            return Err(Error::Training(format!(
                "{what} needs at least {min_each} example(s) of each class, got {p} patient / {c} control"
            )));
        }
        Ok(())
    }

    pub(crate) fn targets(&self) -> Vec<f64> {
        self.labels.iter().map(|l| if l.is_patient() { 1.0 } else { 0.0 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "NB")]
    NaiveBayes,
    #[serde(rename = "LR")]
    Logistic,
    #[serde(rename = "MLP")]
    Mlp,
    #[serde(rename = "SVM-linear")]
    SvmLinear,
    #[serde(rename = "SVM-poly2")]
    SvmPoly2,
    #[serde(rename = "DT")]
    DecisionTree,
    #[serde(rename = "RF")]
    RandomForest,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::NaiveBayes => "NB",
            Family::Logistic => "LR",
            Family::Mlp => "MLP",
            Family::SvmLinear => "SVM-linear",
            Family::SvmPoly2 => "SVM-poly2",
            Family::DecisionTree => "DT",
            Family::RandomForest => "RF",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Family-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    NaiveBayes(NaiveBayesModel),
    Logistic(LogisticModel),
    Mlp(MlpModel),
    Svm(SvmModel),
    Tree(TreeModel),
    Forest(ForestModel),
}

/// Scoring surface shared by every fitted family.
pub trait Predictor {
    /// Monotone confidence that `x` is a Patient.
    fn score(&self, x: &[f64]) -> f64;

    /// Scores strictly above this value are labelled Patient.
    fn threshold(&self) -> f64 {
        0.5
    }
}

impl ModelParams {
    fn predictor(&self) -> &dyn Predictor {
        match self {
            ModelParams::NaiveBayes(m) => m,
            ModelParams::Logistic(m) => m,
            ModelParams::Mlp(m) => m,
            ModelParams::Svm(m) => m,
            ModelParams::Tree(m) => m,
            ModelParams::Forest(m) => m,
        }
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// An immutable fitted classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub family: Family,
    pub feature_names: Vec<String>,
    pub seed: Option<u64>,
    pub params: ModelParams,
}

impl TrainedModel {
    pub(crate) fn new(family: Family, data: &LabeledDataset, seed: Option<u64>, params: ModelParams) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            family,
            feature_names: data.feature_names().to_vec(),
            seed,
            params,
        }
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::Contract(format!(
                "{} model expects {} features, got {}",
                self.family,
                self.n_features(),
                x.len()
            )));
        }
        Ok(())
    }

    /// NB posterior, LR probability, MLP output, SVM decision value,
    /// DT leaf fraction or RF vote fraction.
    pub fn predict_score(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.params.predictor().score(x))
    }

    /// Patient iff the score exceeds the family threshold; ties go to Control.
    pub fn predict_label(&self, x: &[f64]) -> Result<ClassLabel> {
        let score = self.predict_score(x)?;
        Ok(if score > self.params.predictor().threshold() {
            ClassLabel::Patient
        } else {
            ClassLabel::Control
        })
    }

    pub fn threshold(&self) -> f64 {
        self.params.predictor().threshold()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("models serialize")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: TrainedModel =
            serde_json::from_str(json).map_err(|e| Error::Format(format!("model JSON: {e}")))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }
}

/// A named classifier configuration.
pub trait Trainer: Send + Sync {
    /// Registry key, e.g. `"svm-poly2"`.
    fn name(&self) -> &'static str;

    /// Row label used in report tables.
    fn display_name(&self) -> &'static str;

    fn family(&self) -> Family;

    /// Seeded families use `seed`; the others ignore it.
    fn train(&self, data: &LabeledDataset, seed: u64) -> Result<TrainedModel>;
}

struct NaiveBayesTrainer;
struct LogisticTrainer;
struct MlpTrainer;
struct SvmTrainer(Kernel);
struct DecisionTreeTrainer(TreeOptions);
struct RandomForestTrainer;

impl Trainer for NaiveBayesTrainer {
    fn name(&self) -> &'static str {
        "naive-bayes"
    }
    fn display_name(&self) -> &'static str {
        "Naive Bayes"
    }
    fn family(&self) -> Family {
        Family::NaiveBayes
    }
    fn train(&self, data: &LabeledDataset, _seed: u64) -> Result<TrainedModel> {
        train_naive_bayes(data)
    }
}

impl Trainer for LogisticTrainer {
    fn name(&self) -> &'static str {
        "logistic"
    }
    fn display_name(&self) -> &'static str {
        "Logistic regression"
    }
    fn family(&self) -> Family {
        Family::Logistic
    }
    fn train(&self, data: &LabeledDataset, _seed: u64) -> Result<TrainedModel> {
        train_logistic(data)
    }
}

impl Trainer for MlpTrainer {
    fn name(&self) -> &'static str {
        "mlp"
    }
    fn display_name(&self) -> &'static str {
        "Multilayer perceptron"
    }
    fn family(&self) -> Family {
        Family::Mlp
    }
    fn train(&self, data: &LabeledDataset, seed: u64) -> Result<TrainedModel> {
        train_mlp(data, seed)
    }
}

impl Trainer for SvmTrainer {
    fn name(&self) -> &'static str {
        match self.0 {
            Kernel::Linear => "svm-linear",
            Kernel::Poly2 => "svm-poly2",
        }
    }
    fn display_name(&self) -> &'static str {
        match self.0 {
            Kernel::Linear => "SVM with linear kernel",
            Kernel::Poly2 => "SVM with polynomial kernel (p=2)",
        }
    }
    fn family(&self) -> Family {
        match self.0 {
            Kernel::Linear => Family::SvmLinear,
            Kernel::Poly2 => Family::SvmPoly2,
        }
    }
    fn train(&self, data: &LabeledDataset, _seed: u64) -> Result<TrainedModel> {
        train_svm(data, self.0)
    }
}

impl Trainer for DecisionTreeTrainer {
    fn name(&self) -> &'static str {
        match self.0.criterion {
            SplitCriterion::InformationGain => "decision-tree",
            SplitCriterion::GainRatio => "decision-tree-gain-ratio",
        }
    }
    fn display_name(&self) -> &'static str {
        match self.0.criterion {
            SplitCriterion::InformationGain => "Decision tree",
            SplitCriterion::GainRatio => "Decision tree (gain ratio)",
        }
    }
    fn family(&self) -> Family {
        Family::DecisionTree
    }
    fn train(&self, data: &LabeledDataset, _seed: u64) -> Result<TrainedModel> {
        tree::train_decision_tree_with(data, &self.0)
    }
}

impl Trainer for RandomForestTrainer {
    fn name(&self) -> &'static str {
        "random-forest"
    }
    fn display_name(&self) -> &'static str {
        "Random forest"
    }
    fn family(&self) -> Family {
        Family::RandomForest
    }
    fn train(&self, data: &LabeledDataset, seed: u64) -> Result<TrainedModel> {
        train_random_forest(data, seed)
    }
}

/// Trainers keyed by name, in registration order.
pub struct Registry {
    trainers: Vec<Box<dyn Trainer>>,
}

/// The seven configurations, in report row order.
pub const DEFAULT_SUITE: [&str; 7] = [
    "mlp",
    "logistic",
    "svm-linear",
    "svm-poly2",
    "decision-tree",
    "random-forest",
    "naive-bayes",
];

impl Registry {
    pub fn empty() -> Self {
        Self { trainers: Vec::new() }
    }

    /// Every built-in configuration: the default suite plus the gain-ratio
    /// decision tree.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(MlpTrainer));
        r.register(Box::new(LogisticTrainer));
        r.register(Box::new(SvmTrainer(Kernel::Linear)));
        r.register(Box::new(SvmTrainer(Kernel::Poly2)));
        r.register(Box::new(DecisionTreeTrainer(TreeOptions::default())));
        r.register(Box::new(RandomForestTrainer));
        r.register(Box::new(NaiveBayesTrainer));
        r.register(Box::new(DecisionTreeTrainer(TreeOptions {
            criterion: SplitCriterion::GainRatio,
            ..TreeOptions::default()
        })));
        r
    }

    /// Adds a trainer, replacing any existing one with the same name.
    pub fn register(&mut self, trainer: Box<dyn Trainer>) {
        self.trainers.retain(|t| t.name() != trainer.name());
        self.trainers.push(trainer);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Trainer> {
        self.trainers.iter().find(|t| t.name() == name).map(|t| t.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.trainers.iter().map(|t| t.name()).collect()
    }

    /// Looks up each name; unknown names are a configuration error.
    pub fn select(&self, names: &[&str]) -> Result<Vec<&dyn Trainer>> {
        names
            .iter()
            .map(|n| {
                self.get(n).ok_or_else(|| {
                    Error::Config(format!(
                        "unknown classifier {n:?} (known: {})",
                        self.names().join(", ")
                    ))
                })
            })
            .collect()
    }

    pub fn default_suite(&self) -> Result<Vec<&dyn Trainer>> {
        self.select(&DEFAULT_SUITE)
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

pub(crate) fn sigmoid(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}
