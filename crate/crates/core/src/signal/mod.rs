//! Multichannel recordings, file ingestion and synthetic cohorts.

mod io;
mod synth;

pub use io::{load_cohort, load_recording, read_manifest, write_manifest, write_recording_csv, ManifestEntry};
pub use synth::{gen_fgn, gen_logistic_map, synth_cohort, CohortSpec};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples per channel.
pub const MIN_SAMPLES: usize = 100;

/// The 19-electrode 10-20 monopolar montage.
pub const DEFAULT_MONTAGE: [&str; 19] = [
    "Fp1", "Fp2", "F3", "F4", "F7", "F8", "Fz", "C3", "C4", "Cz", "P3", "P4", "Pz", "T3", "T4",
    "T5", "T6", "O1", "O2",
];

pub const DEFAULT_SAMPLING_RATE_HZ: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Patient,
    Control,
}

impl ClassLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Patient => "patient",
            ClassLabel::Control => "control",
        }
    }

    pub fn is_patient(self) -> bool {
        self == ClassLabel::Patient
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "patient" => Ok(ClassLabel::Patient),
            "control" => Ok(ClassLabel::Control),
            other => Err(Error::Format(format!(
                "unknown class label {other:?} (expected \"patient\" or \"control\")"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub label: String,
    pub samples: Vec<f64>,
}

/// An immutable multichannel recording of one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    subject_id: String,
    class_label: ClassLabel,
    sampling_rate_hz: f64,
    channels: Vec<Channel>,
}

impl Recording {
    pub fn new(
        subject_id: impl Into<String>,
        class_label: ClassLabel,
        sampling_rate_hz: f64,
        channels: Vec<Channel>,
    ) -> Result<Self> {
        let subject_id = subject_id.into();
        if !(sampling_rate_hz.is_finite() && sampling_rate_hz > 0.0) {
            return Err(Error::Param(format!(
                "sampling rate must be positive, got {sampling_rate_hz}"
            )));
        }
        let first = channels
            .first()
            .ok_or_else(|| Error::Format(format!("recording {subject_id} has no channels")))?;
        let len = first.samples.len();
        if len < MIN_SAMPLES {
            return Err(Error::Format(format!(
                "recording {subject_id} has {len} samples per channel, need at least {MIN_SAMPLES}"
            )));
        }
        for (i, ch) in channels.iter().enumerate() {
            if ch.samples.len() != len {
                return Err(Error::Format(format!(
                    "recording {subject_id}: channel {} has {} samples, expected {len}",
                    ch.label,
                    ch.samples.len()
                )));
            }
            if channels[..i].iter().any(|c| c.label == ch.label) {
                return Err(Error::Format(format!(
                    "recording {subject_id}: duplicate channel label {}",
                    ch.label
                )));
            }
        }
        Ok(Self {
            subject_id,
            class_label,
            sampling_rate_hz,
            channels,
        })
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn class_label(&self) -> ClassLabel {
        self.class_label
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel_labels(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|c| c.label.as_str())
    }

    pub fn n_samples(&self) -> usize {
        self.channels[0].samples.len()
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.sampling_rate_hz
    }

    /// Keeps only the named channels, in the order given.
    pub fn select_channels(&self, labels: &[String]) -> Result<Recording> {
        let channels = labels
            .iter()
            .map(|l| {
                self.channels
                    .iter()
                    .find(|c| &c.label == l)
                    .cloned()
                    .ok_or_else(|| {
                        Error::Format(format!(
                            "recording {} has no channel {l}",
                            self.subject_id
                        ))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Recording::new(
            self.subject_id.clone(),
            self.class_label,
            self.sampling_rate_hz,
            channels,
        )
    }
}

/// Splits a recording into non-overlapping consecutive windows of
/// `epoch_samples`, starting at sample 0, keeping at most `max_epochs`.
pub fn epoch(recording: &Recording, epoch_samples: usize, max_epochs: usize) -> Result<Vec<Recording>> {
    if epoch_samples < MIN_SAMPLES {
        return Err(Error::Param(format!(
            "epoch length must be at least {MIN_SAMPLES} samples, got {epoch_samples}"
        )));
    }
    if max_epochs == 0 {
        return Err(Error::Param("max_epochs must be at least 1".into()));
    }
    let available = recording.n_samples() / epoch_samples;
    if available == 0 {
        return Err(Error::Param(format!(
            "recording {} has {} samples, shorter than one epoch of {epoch_samples}",
            recording.subject_id,
            recording.n_samples()
        )));
    }
    (0..available.min(max_epochs))
        .map(|e| {
            let range = e * epoch_samples..(e + 1) * epoch_samples;
            let channels = recording
                .channels
                .iter()
                .map(|c| Channel {
                    label: c.label.clone(),
                    samples: c.samples[range.clone()].to_vec(),
                })
                .collect();
            Recording::new(
                recording.subject_id.clone(),
                recording.class_label,
                recording.sampling_rate_hz,
                channels,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_recording(n: usize) -> Recording {
        let channels = ["Fp1", "Fp2"]
            .iter()
            .enumerate()
            .map(|(c, l)| Channel {
                label: l.to_string(),
                samples: (0..n).map(|i| (i * (c + 1)) as f64).collect(),
            })
            .collect();
        Recording::new("S1", ClassLabel::Patient, 1000.0, channels).unwrap()
    }

    #[test]
    fn epochs_are_disjoint_prefix_windows() {
        let rec = ramp_recording(10_000);
        let epochs = epoch(&rec, 2500, 4).unwrap();
        assert_eq!(epochs.len(), 4);
        let mut joined = Vec::new();
        for e in &epochs {
            assert_eq!(e.subject_id(), "S1");
            assert_eq!(e.class_label(), ClassLabel::Patient);
            joined.extend_from_slice(&e.channels()[1].samples);
        }
        assert_eq!(joined, rec.channels()[1].samples);

        let limited = epoch(&rec, 3000, 10).unwrap();
        assert_eq!(limited.len(), 3);
        assert_eq!(limited[2].channels()[0].samples[0], 6000.0);
    }

    #[test]
    fn single_full_epoch_is_identity() {
        let rec = ramp_recording(10_000);
        let epochs = epoch(&rec, 10_000, 1).unwrap();
        assert_eq!(epochs, vec![rec]);
    }

    #[test]
    fn short_recording_rejected() {
        let rec = ramp_recording(999);
        assert!(matches!(epoch(&rec, 1000, 1), Err(Error::Param(_))));
    }

    #[test]
    fn recording_invariants() {
        let ch = |l: &str, n: usize| Channel {
            label: l.into(),
            samples: vec![0.0; n],
        };
        assert!(Recording::new("a", ClassLabel::Control, 0.0, vec![ch("x", 100)]).is_err());
        assert!(Recording::new("a", ClassLabel::Control, 1.0, vec![ch("x", 99)]).is_err());
        assert!(Recording::new("a", ClassLabel::Control, 1.0, vec![ch("x", 100), ch("y", 101)]).is_err());
        assert!(Recording::new("a", ClassLabel::Control, 1.0, vec![ch("x", 100), ch("x", 100)]).is_err());
        let ok = Recording::new("a", ClassLabel::Control, 500.0, vec![ch("x", 1000)]).unwrap();
        assert_eq!(ok.duration_s(), 2.0);
    }

    #[test]
    fn label_parsing() {
        assert_eq!("Patient".parse::<ClassLabel>().unwrap(), ClassLabel::Patient);
        assert_eq!("control".parse::<ClassLabel>().unwrap(), ClassLabel::Control);
        assert!("healthy".parse::<ClassLabel>().is_err());
    }
}
