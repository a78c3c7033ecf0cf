//! The four pipeline stages behind the `eegcx` binary. Each command takes a
//! serializable config, writes its artifacts under an output directory and
//! records the config (including the master seed) in a JSON artifact, so a
//! run can be repeated from its own output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::Registry;
use crate::error::{Error, Result};
use crate::eval::{leakage_audit, optimism_curve, run_cv, CvConfig, EvalReport, LeakageAudit, OptimismCurve};
use crate::features::{build_feature_matrix, FeatureMatrix, HfdParams, SampEnParams};
use crate::signal::{epoch, load_cohort, synth_cohort, write_manifest, write_recording_csv, CohortSpec, ManifestEntry, Recording};

pub const TOOL: &str = "eegcx";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const FEATURES_FILE: &str = "features.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TABLE: &str = "report.txt";
pub const AUDIT_JSON: &str = "audit.json";
pub const AUDIT_CSV: &str = "audit.csv";
pub const OPTIMISM_CSV: &str = "optimism.csv";

/// A command's result together with the exact config that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact<C, R> {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config: C,
    pub result: R,
}

impl<C: Serialize, R: Serialize> Artifact<C, R> {
    fn new(command: &str, seed: Option<u64>, config: C, result: R) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub cohort: CohortSpec,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateSummary {
    pub subjects: usize,
    pub patients: usize,
    pub controls: usize,
    pub channels: usize,
    pub samples: usize,
    pub files: Vec<String>,
}

/// Writes one channel CSV per subject, `manifest.json` and `generate.json`.
pub fn cmd_generate(config: &GenerateConfig) -> Result<GenerateSummary> {
    config.cohort.validate()?;
    let cohort = synth_cohort(&config.cohort)?;
    ensure_dir(&config.out)?;
    let mut entries = Vec::with_capacity(cohort.len());
    for rec in &cohort {
        let file = format!("{}.csv", rec.subject_id());
        write_recording_csv(config.out.join(&file), rec)?;
        entries.push(ManifestEntry {
            file,
            subject_id: rec.subject_id().to_string(),
            label: rec.class_label(),
            sampling_rate_hz: rec.sampling_rate_hz(),
        });
    }
    write_manifest(config.out.join(MANIFEST_FILE), &entries)?;
    let summary = GenerateSummary {
        subjects: cohort.len(),
        patients: config.cohort.n_patients,
        controls: config.cohort.n_controls,
        channels: config.cohort.channels,
        samples: config.cohort.epoch_samples,
        files: entries.into_iter().map(|e| e.file).collect(),
    };
    let artifact = Artifact::new("generate", Some(config.cohort.seed), config, &summary);
    write(&config.out.join("generate.json"), &artifact.to_json())?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub manifest: PathBuf,
    /// Channel labels to keep, in order; `None` keeps every channel.
    pub channels: Option<Vec<String>>,
    pub hfd: HfdParams,
    pub sampen: SampEnParams,
    /// Split each recording into epochs of this many samples; `None` uses
    /// the whole recording as one instance.
    pub epoch_samples: Option<usize>,
    pub max_epochs: usize,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractSummary {
    pub instances: usize,
    pub subjects: usize,
    pub features: Vec<String>,
}

fn instances(cohort: &[Recording], config: &ExtractConfig) -> Result<Vec<Recording>> {
    let mut out = Vec::new();
    for rec in cohort {
        let rec = match &config.channels {
            Some(labels) => rec.select_channels(labels)?,
            None => rec.clone(),
        };
        match config.epoch_samples {
            Some(len) => out.extend(epoch(&rec, len, config.max_epochs)?),
            None => out.push(rec),
        }
    }
    Ok(out)
}

/// Computes HFD and SampEn for every channel of every instance and writes
/// `features.csv` and `extract.json`.
pub fn cmd_extract(config: &ExtractConfig) -> Result<ExtractSummary> {
    if config.max_epochs == 0 {
        return Err(Error::Config("max_epochs must be at least 1".into()));
    }
    if let Some(labels) = &config.channels {
        if labels.is_empty() {
            return Err(Error::Config("empty channel list".into()));
        }
    }
    let cohort = load_cohort(&config.manifest)?;
    let instances = instances(&cohort, config)?;
    let matrix = build_feature_matrix(&instances, &config.hfd, &config.sampen)?;
    ensure_dir(&config.out)?;
    matrix.write_csv(config.out.join(FEATURES_FILE))?;
    let summary = ExtractSummary {
        instances: matrix.n_rows(),
        subjects: cohort.len(),
        features: matrix.feature_names().to_vec(),
    };
    let artifact = Artifact::new("extract", None, config, &summary);
    write(&config.out.join("extract.json"), &artifact.to_json())?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateConfig {
    pub features: PathBuf,
    pub cv: CvConfig,
    /// Registry names, in report order.
    pub classifiers: Vec<String>,
    pub out: PathBuf,
}

/// Cross-validates the selected classifiers and writes `report.json` and the
/// fixed-width `report.txt`.
pub fn cmd_evaluate(config: &EvaluateConfig) -> Result<EvalReport> {
    let matrix = FeatureMatrix::read_csv(&config.features)?;
    config.cv.validate(matrix.n_features())?;
    let registry = Registry::builtin();
    let names: Vec<&str> = config.classifiers.iter().map(String::as_str).collect();
    let trainers = registry.select(&names)?;
    let report = run_cv(&matrix, &config.cv, &trainers)?;
    ensure_dir(&config.out)?;
    let artifact = Artifact::new("evaluate", Some(config.cv.seed), config, &report);
    write(&config.out.join(REPORT_JSON), &artifact.to_json())?;
    write(&config.out.join(REPORT_TABLE), &report.to_table())?;
    Ok(report)
}

/// Reads a `report.json` written by [`cmd_evaluate`].
pub fn read_report(path: impl AsRef<Path>) -> Result<Artifact<EvaluateConfig, EvalReport>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub n: usize,
    pub k: usize,
    pub seeds: usize,
    pub seed: u64,
    /// Sample sizes for the optimism curve; empty skips it.
    pub sizes: Vec<usize>,
    /// Feature counts for the optimism curve.
    pub ks: Vec<usize>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub audit: LeakageAudit,
    pub optimism: Option<OptimismCurve>,
}

/// Runs the leakage audit (and optimism curve when sizes are given) and
/// writes `audit.json`, `audit.csv` and `optimism.csv`.
pub fn cmd_audit(config: &AuditConfig) -> Result<AuditResult> {
    let audit = leakage_audit(config.n, config.k, config.seeds, config.seed)?;
    let optimism = if config.sizes.is_empty() {
        None
    } else {
        Some(optimism_curve(&config.sizes, &config.ks, config.seeds, config.seed)?)
    };
    let result = AuditResult { audit, optimism };
    ensure_dir(&config.out)?;

    let mut csv = String::from("pipeline,n,k,seeds,mean_accuracy,sd_accuracy\n");
    for p in &result.audit.pipelines {
        let name = serde_json::to_value(p.pipeline).expect("enum serializes");
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            name.as_str().unwrap_or_default(),
            config.n,
            config.k,
            config.seeds,
            p.mean_accuracy,
            p.sd_accuracy
        );
    }
    write(&config.out.join(AUDIT_CSV), &csv)?;
    if let Some(curve) = &result.optimism {
        let mut csv = String::from("n,k,seeds,mean_accuracy,sd_accuracy\n");
        for p in &curve.points {
            let _ = writeln!(csv, "{},{},{},{},{}", p.n, p.k, config.seeds, p.mean_accuracy, p.sd_accuracy);
        }
        write(&config.out.join(OPTIMISM_CSV), &csv)?;
    }
    let artifact = Artifact::new("audit", Some(config.seed), config, &result);
    write(&config.out.join(AUDIT_JSON), &artifact.to_json())?;
    Ok(result)
}
