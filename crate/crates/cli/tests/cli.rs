use std::path::Path;
use std::process::{Command, Output};

fn sandflip(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sandflip"))
        .args(args)
        .env("SANDFLIP_OUTPUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn missing_config_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = sandflip(&["run", "missing.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_config_and_bad_arguments_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "[model]\nmodel = sf\nalpha = -1\n[topology]\nn = 10\n[run]\nscenario = E1\n");
    let out = sandflip(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(sandflip(&["frobnicate"], dir.path()).status.code(), Some(1));
}

#[test]
fn check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = sandflip(&["check"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn oracle_refuses_twenty_sites() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "big.cfg", "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 20\n[run]\nscenario = custom\nsample_times = 1\n");
    let out = sandflip(&["oracle", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("too large"));
}

#[test]
fn oracle_small_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.cfg", "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 8\n[run]\nscenario = custom\nsample_times = 0.1, 1, 10\n");
    let out = sandflip(&["oracle", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("custom_oracle_data.csv").is_file());
}

#[test]
fn run_writes_outputs_to_env_dir_and_plot_works() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e1.cfg", "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 500\n[run]\nscenario = E1\nreplicas = 2\n");
    let out = sandflip(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("e1_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["scenario"], "E1");
    let manifest = dir.path().join("e1_manifest.json");
    let out = sandflip(&["plot", manifest.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let script = std::fs::read_to_string(dir.path().join("e1_plot.py")).unwrap();
    assert!(script.contains("e1_data.csv"));
    assert_eq!(sandflip(&["plot", "nope.json"], dir.path()).status.code(), Some(1));
}

#[test]
fn exhausted_budget_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cap.cfg", "[model]\nmodel = sf\nalpha = 0.5\n[topology]\nn = 1000\n[run]\nscenario = E1\nmax_events = 100\n");
    assert_eq!(sandflip(&["run", &cfg], dir.path()).status.code(), Some(2));
}
