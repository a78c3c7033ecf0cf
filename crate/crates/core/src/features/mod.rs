//! Per-channel complexity features and the instance-by-feature matrix.

mod higuchi;
mod sampen;

pub use higuchi::{curve_lengths, higuchi_fd, HfdParams, FD_RANGE_SLACK};
pub use sampen::{
    match_counts, population_sd, sample_entropy, sample_entropy_with_counts, MatchCounts,
    SampEnParams,
};

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{ClassLabel, Recording};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub subject_id: String,
    pub label: ClassLabel,
}

/// Instances by named features, with per-row subject and class metadata.
/// Every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    feature_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    meta: Vec<InstanceMeta>,
}

impl FeatureMatrix {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, meta: Vec<InstanceMeta>) -> Result<Self> {
        if rows.len() != meta.len() {
            return Err(Error::Contract(format!(
                "{} rows but {} metadata entries",
                rows.len(),
                meta.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != feature_names.len() {
                return Err(Error::Contract(format!(
                    "row {i} has {} values, expected {}",
                    row.len(),
                    feature_names.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Degenerate(format!(
                    "non-finite value at row {i}, feature {}",
                    feature_names[j]
                )));
            }
        }
        Ok(Self { feature_names, rows, meta })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn meta(&self) -> &[InstanceMeta] {
        &self.meta
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn labels(&self) -> Vec<ClassLabel> {
        self.meta.iter().map(|m| m.label).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            meta: indices.iter().map(|&i| self.meta[i].clone()).collect(),
        }
    }

    /// Columns at `indices`, in that order.
    pub fn select_features(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: indices.iter().map(|&j| self.feature_names[j].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| indices.iter().map(|&j| r[j]).collect())
                .collect(),
            meta: self.meta.clone(),
        }
    }

    /// Same metadata, new values and names. Used by transforms.
    pub(crate) fn with_values(&self, feature_names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<FeatureMatrix> {
        FeatureMatrix::new(feature_names, rows, self.meta.clone())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("subject_id,label");
        for name in &self.feature_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (row, meta) in self.rows.iter().zip(&self.meta) {
            out.push_str(&meta.subject_id);
            out.push(',');
            out.push_str(meta.label.as_str());
            for v in row {
                write!(out, ",{v:.16e}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<FeatureMatrix> {
        let mut lines = text
            .lines()
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Format("empty feature file".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 3 || cols[0] != "subject_id" || cols[1] != "label" {
            return Err(Error::Format(
                "feature header must start with subject_id,label and name at least one feature".into(),
            ));
        }
        let names: Vec<String> = cols[2..].iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        let mut meta = Vec::new();
        for (i, line) in lines.enumerate() {
            let row_no = i + 2;
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != cols.len() {
                return Err(Error::Format(format!(
                    "row {row_no} has {} columns, expected {}",
                    cells.len(),
                    cols.len()
                )));
            }
            let label: ClassLabel = cells[1]
                .parse()
                .map_err(|e| Error::Format(format!("row {row_no}: {e}")))?;
            let values = cells[2..]
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    c.parse::<f64>().map_err(|_| {
                        Error::Format(format!("row {row_no}, column {}: not a number: {c:?}", j + 3))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            meta.push(InstanceMeta {
                subject_id: cells[0].to_string(),
                label,
            });
            rows.push(values);
        }
        if rows.is_empty() {
            return Err(Error::Format("feature file has no rows".into()));
        }
        FeatureMatrix::new(names, rows, meta).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FeatureMatrix::from_csv(&text)
    }
}

/// One row per instance: all HFD features in channel order, then all SampEn
/// features in channel order.
pub fn build_feature_matrix(instances: &[Recording], hfd: &HfdParams, se: &SampEnParams) -> Result<FeatureMatrix> {
    let first = instances
        .first()
        .ok_or_else(|| Error::Param("no instances to extract features from".into()))?;
    let labels: Vec<&str> = first.channel_labels().collect();
    for rec in instances {
        if !rec.channel_labels().eq(labels.iter().copied()) {
            return Err(Error::Contract(format!(
                "subject {} does not share the channel layout of subject {}",
                rec.subject_id(),
                first.subject_id()
            )));
        }
    }

    let per_instance: Vec<Result<Vec<f64>>> = instances
        .par_iter()
        .map(|rec| {
            let wrap = |channel: &str, source: Error| Error::Feature {
                subject: rec.subject_id().to_string(),
                channel: channel.to_string(),
                source: Box::new(source),
            };
            let mut hfd_row = Vec::with_capacity(labels.len());
            let mut se_row = Vec::with_capacity(labels.len());
            for ch in rec.channels() {
                hfd_row.push(higuchi_fd(&ch.samples, hfd).map_err(|e| wrap(&ch.label, e))?);
                se_row.push(sample_entropy(&ch.samples, se).map_err(|e| wrap(&ch.label, e))?);
            }
            hfd_row.extend(se_row);
            Ok(hfd_row)
        })
        .collect();
    let rows = per_instance.into_iter().collect::<Result<Vec<_>>>()?;

    let names = labels
        .iter()
        .map(|l| format!("HFD:{l}"))
        .chain(labels.iter().map(|l| format!("SampEn:{l}")))
        .collect();
    let meta = instances
        .iter()
        .map(|r| InstanceMeta {
            subject_id: r.subject_id().to_string(),
            label: r.class_label(),
        })
        .collect();
    FeatureMatrix::new(names, rows, meta)
}
