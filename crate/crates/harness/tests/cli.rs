use std::path::Path;
use std::process::{Command, Output};

const SMALL_RUN: &str = r#"{
  "experiment": "fill-indep",
  "space": "square_grid:16",
  "family": {"count": 3}
}"#;

fn weakfill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakfill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_into(config: &Path, out: &Path) -> Output {
    weakfill(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.json");
    std::fs::write(&config, SMALL_RUN).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = run_into(&config, out);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    }
    let csv_a = std::fs::read(a.join("report.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.join("report.csv")).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "fill-indep");
    assert_eq!(report["config"]["space"], "square_grid:16");
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 16);
    let header = String::from_utf8(csv_a).unwrap();
    assert!(header.starts_with("config_hash,case,function,"));
}

#[test]
fn bad_configs_exit_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"experiment": "fill-indep", "p": 0.5}"#).unwrap();
    assert_eq!(run_into(&config, dir.path()).status.code(), Some(2));
    std::fs::write(&config, r#"{"experiment": "fill-indep", "colour": 1}"#).unwrap();
    assert_eq!(run_into(&config, dir.path()).status.code(), Some(2));
    std::fs::write(&config, SMALL_RUN).unwrap();
    let clash = weakfill(&["run", "--experiment", "thm-main", "--config", config.to_str().unwrap()]);
    assert_eq!(clash.status.code(), Some(2));
    assert_eq!(weakfill(&["run", "--experiment", "no-such-suite"]).status.code(), Some(2));
}

#[test]
fn lists_every_suite() {
    let out = weakfill(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["thm-main", "haj-incl", "fill-indep", "subcritical", "qi-invariance", "trace-roundtrip", "halfspace"] {
        assert!(text.contains(id), "{id} missing from\n{text}");
    }
}

#[test]
fn exports_spaces_and_fillings() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("cloud.txt");
    let out = weakfill(&["space", "--spec", "interval_grid:10", "--export", cloud.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let loaded = weakfill_core::metric_space::load_space(&cloud).unwrap();
    assert_eq!(loaded.len(), 10);

    let record = dir.path().join("filling.json");
    let out = weakfill(&[
        "fill", "--space", "square_grid:8", "--depth", "2", "--seed", "4", "--export", record.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&record).unwrap()).unwrap();
    assert_eq!(json["seed"], 4);
    assert_eq!(json["levels"], 3);
}
