//! Channel CSV and cohort manifest formats.
//!
//! A channel CSV has one header line of channel labels followed by one line
//! per sample instant. A manifest is a JSON array of
//! `{"file", "subject_id", "label", "sampling_rate_hz"}` objects; relative
//! `file` paths resolve against the manifest's directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Channel, ClassLabel, Recording};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub subject_id: String,
    pub label: ClassLabel,
    pub sampling_rate_hz: f64,
}

fn parse_channel_csv(text: &str) -> Result<Vec<Channel>> {
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines
        .next()
        .filter(|h| !h.trim().is_empty())
        .ok_or_else(|| Error::Format("empty file".into()))?;
    let mut channels: Vec<Channel> = header
        .split(',')
        .map(|l| Channel {
            label: l.trim().to_string(),
            samples: Vec::new(),
        })
        .collect();
    let width = channels.len();

    for (i, line) in lines.enumerate() {
        // header is line 1
        let row = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != width {
            return Err(Error::Format(format!(
                "row {row} has {} columns, expected {width}",
                cells.len()
            )));
        }
        for (col, (cell, ch)) in cells.iter().zip(channels.iter_mut()).enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                Error::Format(format!("row {row}, column {}: not a number: {cell:?}", col + 1))
            })?;
            if !value.is_finite() {
                return Err(Error::Format(format!(
                    "row {row}, column {}: non-finite value {cell:?}",
                    col + 1
                )));
            }
            ch.samples.push(value);
        }
    }
    if channels[0].samples.is_empty() {
        return Err(Error::Format("no samples".into()));
    }
    Ok(channels)
}

/// Reads a channel CSV; subject metadata comes from the manifest entry.
pub fn load_recording(path: impl AsRef<Path>, entry: &ManifestEntry) -> Result<Recording> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let channels = parse_channel_csv(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    Recording::new(entry.subject_id.clone(), entry.label, entry.sampling_rate_hz, channels)
}

pub fn write_recording_csv(path: impl AsRef<Path>, recording: &Recording) -> Result<()> {
    let path = path.as_ref();
    let channels = recording.channels();
    let mut out = String::with_capacity(recording.n_samples() * channels.len() * 20);
    out.push_str(&recording.channel_labels().collect::<Vec<_>>().join(","));
    out.push('\n');
    for i in 0..recording.n_samples() {
        for (c, ch) in channels.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            write!(out, "{}", ch.samples[i]).expect("writing to a String");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<()> {
    let path = path.as_ref();
    let mut json = serde_json::to_string_pretty(entries).expect("manifest serializes");
    json.push('\n');
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

fn resolve(manifest: &Path, file: &str) -> PathBuf {
    let file = Path::new(file);
    if file.is_absolute() {
        file.to_path_buf()
    } else {
        manifest.parent().unwrap_or_else(|| Path::new(".")).join(file)
    }
}

/// Loads every recording listed in a manifest, in manifest order.
pub fn load_cohort(manifest: impl AsRef<Path>) -> Result<Vec<Recording>> {
    let manifest = manifest.as_ref();
    read_manifest(manifest)?
        .iter()
        .map(|entry| {
            let path = resolve(manifest, &entry.file);
            if !path.exists() {
                return Err(Error::Format(format!(
                    "manifest entry {} references missing file {}",
                    entry.subject_id,
                    path.display()
                )));
            }
            load_recording(&path, entry)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(file: &str) -> ManifestEntry {
        ManifestEntry {
            file: file.into(),
            subject_id: "S01".into(),
            label: ClassLabel::Control,
            sampling_rate_hz: 1000.0,
        }
    }

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn loads_three_channels() {
        let dir = tempfile::tempdir().unwrap();
        let mut text = String::from("Fp1,Fp2,F3\n");
        for i in 0..100 {
            text.push_str(&format!("{i},{}.5,-{i}e-3\r\n", i * 2));
        }
        let p = write(dir.path(), "a.csv", &text);
        let rec = load_recording(&p, &entry("a.csv")).unwrap();
        assert_eq!(rec.channels().len(), 3);
        assert_eq!(rec.n_samples(), 100);
        assert_eq!(rec.channel_labels().collect::<Vec<_>>(), ["Fp1", "Fp2", "F3"]);
        assert_eq!(rec.channels()[1].samples[3], 6.5);
        assert_eq!(rec.channels()[2].samples[5], -5e-3);
    }

    #[test]
    fn ragged_row_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let mut text = String::from("a,b\n");
        for i in 0..100 {
            if i == 40 {
                text.push_str("1\n");
            } else {
                text.push_str("1,2\n");
            }
        }
        let p = write(dir.path(), "r.csv", &text);
        let err = load_recording(&p, &entry("r.csv")).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
        assert!(err.to_string().contains("row 42"), "{err}");
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let mut text = String::from("a,b\n");
        for i in 0..100 {
            text.push_str(if i == 3 { "1,x\n" } else { "1,2\n" });
        }
        let p = write(dir.path(), "n.csv", &text);
        let msg = load_recording(&p, &entry("n.csv")).unwrap_err().to_string();
        assert!(msg.contains("row 5") && msg.contains("column 2"), "{msg}");
    }

    #[test]
    fn header_only_and_empty() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "h.csv", "a,b\n");
        let msg = load_recording(&p, &entry("h.csv")).unwrap_err().to_string();
        assert!(msg.contains("no samples"), "{msg}");
        let p = write(dir.path(), "e.csv", "");
        assert!(matches!(load_recording(&p, &entry("e.csv")), Err(Error::Format(_))));
    }

    #[test]
    fn csv_and_manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let samples: Vec<f64> = (0..150).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
        let rec = Recording::new(
            "S01",
            ClassLabel::Control,
            1000.0,
            vec![Channel { label: "Cz".into(), samples }],
        )
        .unwrap();
        write_recording_csv(dir.path().join("s.csv"), &rec).unwrap();
        let m = dir.path().join("manifest.json");
        write_manifest(&m, &[entry("s.csv")]).unwrap();
        let loaded = load_cohort(&m).unwrap();
        assert_eq!(loaded, vec![rec]);
    }

    #[test]
    fn missing_file_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("manifest.json");
        write_manifest(&m, &[entry("gone.csv")]).unwrap();
        let msg = load_cohort(&m).unwrap_err().to_string();
        assert!(msg.contains("gone.csv"), "{msg}");
    }

    #[test]
    fn manifest_schema() {
        let json = r#"[{"file":"x.csv","subject_id":"P1","label":"patient","sampling_rate_hz":256}]"#;
        let parsed: Vec<ManifestEntry> = serde_json::from_str(json).unwrap();
        assert_eq!(parsed[0].label, ClassLabel::Patient);
        assert_eq!(parsed[0].sampling_rate_hz, 256.0);
    }
}
