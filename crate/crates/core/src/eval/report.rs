use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::CvConfig;
use crate::error::{Error, Result};
use crate::signal::ClassLabel;

pub const LEAKY_STAMP: &str = "LEAKY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub pc_count: usize,
    pub correct: usize,
    pub total: usize,
    /// Percentage, two decimals.
    pub accuracy: f64,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierRow {
    pub classifier: String,
    pub display_name: String,
    pub cells: Vec<Cell>,
}

/// One test-fold prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub fold: usize,
    pub classifier: String,
    pub pc_count: usize,
    pub instance: usize,
    pub subject_id: String,
    pub truth: ClassLabel,
    pub score: f64,
    pub predicted: ClassLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// `Some("LEAKY")` when preprocessing saw the test rows.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stamp: Option<String>,
    pub config: CvConfig,
    pub n_instances: usize,
    pub n_patients: usize,
    pub n_controls: usize,
    pub n_features: usize,
    pub pc_counts: Vec<usize>,
    pub classifiers: Vec<ClassifierRow>,
    /// Mean accuracy over classifiers, per PC count.
    pub average_accuracy: Vec<f64>,
    /// Cumulative explained variance (%), averaged over training folds when
    /// preprocessing is fitted inside folds.
    pub explained_variance: Vec<f64>,
    pub folds: Vec<Vec<usize>>,
    pub predictions: Vec<Prediction>,
}

const NAME_WIDTH: usize = 40;
const GROUP_WIDTH: usize = 18;

fn pc_heading(m: usize) -> String {
    if m == 1 { "1 PC".to_string() } else { format!("{m} PCs") }
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("evaluation report: {e}")))
    }

    pub fn cell(&self, classifier: &str, pc_count: usize) -> Option<&Cell> {
        self.classifiers
            .iter()
            .find(|r| r.classifier == classifier)?
            .cells
            .iter()
            .find(|c| c.pc_count == pc_count)
    }

    /// Fixed-width table: classifiers as rows, an Accuracy/AUC column pair
    /// per PC count, then average-accuracy and explained-variance rows.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        if let Some(stamp) = &self.stamp {
            let _ = writeln!(out, "*** {stamp}: scaler and PCA were fitted on the whole dataset, test folds included ***");
        }
        let _ = writeln!(
            out,
            "Classification results: {}-fold cross-validation, {} instances ({} patients, {} controls), {} features",
            self.config.folds, self.n_instances, self.n_patients, self.n_controls, self.n_features
        );
        let _ = write!(out, "{:<NAME_WIDTH$}", "");
        for &m in &self.pc_counts {
            let _ = write!(out, "{:<GROUP_WIDTH$}", pc_heading(m));
        }
        out.push('\n');
        let _ = write!(out, "{:<NAME_WIDTH$}", "Classifier");
        for _ in &self.pc_counts {
            let _ = write!(out, "{:<10}{:<8}", "Accuracy", "AUC");
        }
        out.push('\n');
        for row in &self.classifiers {
            let _ = write!(out, "{:<NAME_WIDTH$}", row.display_name);
            for c in &row.cells {
                let _ = write!(out, "{:<10}{:<8}", format!("{:.2}%", c.accuracy), format!("{:.3}", c.auc));
            }
            out.push('\n');
        }
        let _ = write!(out, "{:<NAME_WIDTH$}", "Average accuracy");
        for a in &self.average_accuracy {
            let _ = write!(out, "{:<GROUP_WIDTH$}", format!("{a:.2}%"));
        }
        out.push('\n');
        let _ = write!(out, "{:<NAME_WIDTH$}", "Explained variance");
        for v in &self.explained_variance {
            let _ = write!(out, "{:<GROUP_WIDTH$}", format!("{v:.2}%"));
        }
        out.push('\n');
        out.lines().map(|l| format!("{}\n", l.trim_end())).collect()
    }
}
