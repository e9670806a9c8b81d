use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mmprox"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn solve_writes_solution_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["solve", "--config"])
        .arg(config("tf_sine.toml"))
        .args(["--solver", "proposed", "--gamma", "0", "--order", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("status=converged objective=0 "), "{stdout}");
    let solution = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert_eq!(solution.lines().count(), 201);
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn bench_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["bench", "--config"])
        .arg(config("scc_desk.toml"))
        .args(["--gamma1", "1", "--eta-mode", "experiment", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = dir.path().join("report.csv");
    let cmp = dir.path().join("compare.csv");
    let out = bin()
        .arg("compare")
        .arg(&report)
        .arg("--out")
        .arg(&cmp)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("max_gap"));
    let text = std::fs::read_to_string(cmp).unwrap();
    assert_eq!(text.lines().count(), 2 + 3);
}

#[test]
fn gen_writes_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["gen", "--config"])
        .arg(config("scc_desk.toml"))
        .args(["--seed", "5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let data = std::fs::read_to_string(dir.path().join("data.csv")).unwrap();
    assert!(data.starts_with("# seed=5\n"));
    assert_eq!(data.lines().count(), 41);
    assert!(dir.path().join("labels.csv").exists());
}

#[test]
fn bad_input_exits_nonzero() {
    let out = bin().args(["bench", "--config", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["solve", "--config"])
        .arg(config("tf_sine.toml"))
        .args(["--solver", "fista"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["solve", "--config"])
        .arg(config("tf_sine.toml"))
        .args(["--eta-mode", "fast"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
