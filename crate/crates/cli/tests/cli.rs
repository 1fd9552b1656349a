use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_shows_every_scenario() {
    let o = lab(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for name in ["besov-extension-bound", "thin-tube-counterexample", "regularity-audit"] {
        assert!(s.contains(name));
    }
    assert_eq!(s.lines().count(), 7);
}

#[test]
fn passing_run_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lab(&["run", "thin-tube-counterexample", "--out", out, "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(dir.path().join("thin-tube-counterexample.tubes.csv").exists());
    assert!(dir.path().join("thin-tube-counterexample.timing.json").exists());
    assert!(stdout(&o).contains("thin-tube-counterexample: passed"));
}

#[test]
fn json_reports_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = lab(&["run", "thin-tube-counterexample", "--out", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("thin-tube-counterexample.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn failed_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.json");
    std::fs::write(&cfg, r#"{"tolerances": {"growth_hi": 1.9}}"#).unwrap();
    let o = lab(&["run", "thin-tube-counterexample", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL ratio growth"));
}

#[test]
fn errors_exit_one() {
    assert_eq!(lab(&["run", "no-such-scenario"]).status.code(), Some(1));
    assert_eq!(lab(&["run", "thin-tube-counterexample", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(lab(&["run", "thin-tube-counterexample", "--config", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(lab(&["bogus"]).status.code(), Some(1));
}

#[test]
fn audit_shortcut_runs_one_shape() {
    let o = lab(&["audit", "disc", "--mesh", "0.03125"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("density minimum disc"));
}

#[test]
fn config_prints_defaults() {
    let o = lab(&["config", "trace-recovery"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scenario"], "trace-recovery");
}
