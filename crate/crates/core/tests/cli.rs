use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eegcx::features::FeatureMatrix;
use eegcx::signal::{read_manifest, write_manifest, ClassLabel};

fn eegcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eegcx")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn default_cohort_and_single_channel_extraction() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort");
    let out = eegcx(&["generate", "--out", path(&cohort)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csvs = fs::read_dir(&cohort)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count();
    assert_eq!(csvs, 34);
    let manifest = read_manifest(cohort.join("manifest.json")).unwrap();
    assert_eq!(manifest.iter().filter(|e| e.label == ClassLabel::Patient).count(), 14);
    assert_eq!(manifest.iter().filter(|e| e.label == ClassLabel::Control).count(), 20);

    let feats = dir.path().join("features");
    let out = eegcx(&["extract", "--manifest", path(&cohort.join("manifest.json")), "--channels", "Fp1", "--out", path(&feats)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let m = FeatureMatrix::read_csv(feats.join("features.csv")).unwrap();
    assert_eq!(m.n_rows(), 34);
    assert_eq!(m.feature_names(), ["HFD:Fp1", "SampEn:Fp1"]);

    let out = eegcx(&["extract", "--manifest", path(&cohort.join("manifest.json")), "--channels", "Xx9", "--out", path(&feats)]);
    assert_eq!(out.status.code(), Some(3));
}

fn snapshot(dir: &Path) -> Vec<(std::ffi::OsString, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn generation_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate", "--patients", "2", "--controls", "3", "--channels", "2", "--samples", "500", "--seed", "7", "--out",
        path(dir.path()),
    ];
    assert!(eegcx(&args).status.success());
    let first = snapshot(dir.path());
    assert_eq!(first.len(), 5 + 2);
    let mut single = vec!["--threads", "1"];
    single.extend(args);
    assert!(eegcx(&single).status.success());
    assert_eq!(first, snapshot(dir.path()));

    let other = dir.path().join("other");
    let mut reseeded = args.to_vec();
    reseeded[10] = "8";
    reseeded[12] = path(&other);
    assert!(eegcx(&reseeded).status.success());
    assert_ne!(fs::read(dir.path().join("P01.csv")).unwrap(), fs::read(other.join("P01.csv")).unwrap());
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = eegcx(&["generate", "--patients", "0", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("patients"));
    assert_eq!(eegcx(&["audit", "--seeds", "0", "--out", path(dir.path())]).status.code(), Some(2));
    assert_eq!(eegcx(&["evaluate", "--mode", "sloppy"]).status.code(), Some(2));
    assert_eq!(eegcx(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_recording_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort");
    let gen = ["generate", "--patients", "2", "--controls", "2", "--channels", "2", "--samples", "300", "--out", path(&cohort)];
    assert!(eegcx(&gen).status.success());
    fs::remove_file(cohort.join("P02.csv")).unwrap();
    let out = eegcx(&["extract", "--manifest", path(&cohort.join("manifest.json")), "--out", path(&dir.path().join("f"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("P02.csv"), "{}", stderr(&out));
}

#[test]
fn evaluate_modes_and_pc_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort");
    let gen = ["generate", "--patients", "6", "--controls", "6", "--channels", "4", "--samples", "1000", "--out", path(&cohort)];
    assert!(eegcx(&gen).status.success());
    let feats = dir.path().join("f");
    assert!(eegcx(&["extract", "--manifest", path(&cohort.join("manifest.json")), "--out", path(&feats)]).status.success());
    let csv = feats.join("features.csv");

    let proper = dir.path().join("proper");
    let out = eegcx(&["evaluate", "--features", path(&csv), "--folds", "4", "--pc", "1,2,3", "--out", path(&proper)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = fs::read_to_string(proper.join("report.txt")).unwrap();
    assert!(table.contains("Naive Bayes") && table.contains("Explained variance"));
    assert!(!table.contains("LEAKY"));
    assert_eq!(String::from_utf8_lossy(&out.stdout), table);

    let leaky = dir.path().join("leaky");
    let out = eegcx(&["evaluate", "--features", path(&csv), "--folds", "4", "--pc", "1,2", "--mode", "leaky", "--out", path(&leaky)]);
    assert!(out.status.success(), "{}", stderr(&out));
    for file in ["report.txt", "report.json"] {
        assert!(fs::read_to_string(leaky.join(file)).unwrap().contains("LEAKY"), "{file}");
    }

    let out = eegcx(&["evaluate", "--features", path(&csv), "--pc", "50", "--out", path(&proper)]);
    assert_eq!(out.status.code(), Some(2));
    let out = eegcx(&["evaluate", "--features", path(&csv), "--classifiers", "knn", "--out", path(&proper)]);
    assert_eq!(out.status.code(), Some(2));
    let out = eegcx(&["evaluate", "--features", path(&dir.path().join("none.csv")), "--out", path(&proper)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn mislabelled_manifest_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let cohort = dir.path().join("cohort");
    let gen = ["generate", "--patients", "1", "--controls", "1", "--channels", "1", "--samples", "200", "--out", path(&cohort)];
    assert!(eegcx(&gen).status.success());
    let manifest = cohort.join("manifest.json");
    let text = fs::read_to_string(&manifest).unwrap().replacen("\"patient\"", "\"depressed\"", 1);
    fs::write(&manifest, text).unwrap();
    let out = eegcx(&["extract", "--manifest", path(&manifest), "--out", path(&dir.path().join("f"))]);
    assert_eq!(out.status.code(), Some(3));
    let entries = vec![];
    write_manifest(&manifest, &entries).unwrap();
    let out = eegcx(&["extract", "--manifest", path(&manifest), "--out", path(&dir.path().join("f"))]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn audit_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = eegcx(&["audit", "--n", "34", "--k", "38", "--seeds", "50", "--sizes", "20,40,80", "--out", path(dir.path())]);
    assert!(out.status.success(), "{}", stderr(&out));
    let audit = fs::read_to_string(dir.path().join("audit.csv")).unwrap();
    let proper: f64 = audit
        .lines()
        .find(|l| l.starts_with("proper,"))
        .unwrap()
        .split(',')
        .nth(4)
        .unwrap()
        .parse()
        .unwrap();
    assert!((45.0..=55.0).contains(&proper), "{proper}");
    let curve = fs::read_to_string(dir.path().join("optimism.csv")).unwrap();
    let means: Vec<f64> = curve.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(means.len(), 3);
    assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
    let json = fs::read_to_string(dir.path().join("audit.json")).unwrap();
    assert!(json.contains("\"command\": \"audit\"") && json.contains("\"seed\": 42"));
}
