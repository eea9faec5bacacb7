use std::path::Path;
use std::process::{Command, Output};

use perfect_code_cli::experiments::prepare;
use perfect_code_cli::report::report;
use perfect_code_cli::{ExperimentConfig, NoiseSetting, ResultRecord};

fn qec5(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qec5")).current_dir(dir).args(args).output().unwrap()
}

#[test]
fn report_on_empty_directory_says_no_records() {
    let dir = tempfile::tempdir().unwrap();
    let summary = report(dir.path()).unwrap();
    assert_eq!(summary.status, "no records");
    assert_eq!(summary.records, 0);
    assert!(dir.path().join("report/summary.json").exists());
}

#[test]
fn report_tabulates_a_prepared_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { noise: NoiseSetting::Off, ..ExperimentConfig::default() };
    prepare("0", &cfg).unwrap().write(dir.path()).unwrap();
    let summary = report(dir.path()).unwrap();
    assert_eq!(summary.status, "ok");
    assert_eq!(summary.prepared.len(), 1);
    assert!((summary.prepared[0].fidelity - 1.0).abs() < 1e-9);
    assert!((summary.averages["off/exact"] - 1.0).abs() < 1e-9);
    let table = std::fs::read_to_string(dir.path().join("report/simulation-table.csv")).unwrap();
    assert!(table.lines().any(|l| l.starts_with("encoding,0,off,exact,")));
    assert!(table.lines().any(|l| l.starts_with("encoding,average,off,exact,")));
}

#[test]
fn record_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let rec = prepare("+i", &ExperimentConfig::default()).unwrap();
    let path = rec.write(dir.path()).unwrap();
    assert_eq!(path.file_name().unwrap(), "prepare-plusi-paper-exact.json");
    assert_eq!(ResultRecord::read(&path).unwrap(), rec);
}

#[test]
fn corrupt_record_fails_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    assert!(report(dir.path()).is_err());
    let out = qec5(dir.path(), &["report", "."]);
    assert!(!out.status.success());
}

#[test]
fn unknown_state_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = qec5(dir.path(), &["prepare", "--state", "2", "--noise", "off", "--out", "r"]);
    assert!(!out.status.success());
}

#[test]
fn toml_config_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "seed = 7\nnoise = \"off\"\n").unwrap();
    let out = qec5(dir.path(), &["--config", "run.toml", "prepare", "--state", "1", "--out", "r"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = ResultRecord::read(&dir.path().join("r/prepare-1-off-exact.json")).unwrap();
    assert_eq!(rec.seed, 7);
    assert_eq!(rec.config.noise, NoiseSetting::Off);
    assert!((rec.metric("fidelity").unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "sede = 7\n").unwrap();
    let out = qec5(dir.path(), &["--config", "bad.toml", "prepare", "--out", "r"]);
    assert!(!out.status.success());
}
