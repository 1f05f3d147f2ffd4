use std::path::Path;
use std::process::{Command, Output};

fn scri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scri")).args(args).env("SCRI_WORKERS", "1").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn lists_all_suites() {
    let o = scri(&["list-suites"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(names.len(), 10);
    assert!(names.iter().any(|n| n == "quasifree-engine"));
}

#[test]
fn unknown_suite_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"suite": "nope"}"#);
    let o = scri(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
    let o = scri(&["run", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_writes_reports_that_render_again() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"suite": "geometry-embedding"}"#);
    let out = dir.path().join("out");
    let o = scri(&["run", "--config", &cfg, "--suite", "quasifree-engine", "--out", out.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    assert!(table.lines().all(|l| !l.starts_with("FAIL")));
    assert!(table.contains("0 failed"));
    let json = out.join("quasifree-engine.json");
    assert!(json.exists() && out.join("quasifree-engine.plot.csv").exists());

    let o = scri(&["render", "--in", json.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    let csv = dir.path().join("r.csv");
    std::fs::write(&csv, stdout(&o)).unwrap();
    let o = scri(&["render", "--in", csv.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let a: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let b: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_override_and_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"suite": "geometry-embedding", "seed": 1}"#);
    let o = scri(&["run", "--config", &cfg, "--seed", "99", "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.starts_with("meta,") && l.contains("seed") && l.ends_with(",99")));
}

#[test]
fn failing_report_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let rep = r#"{"suite": "demo", "metadata": {}, "records": [
        {"name": "ok", "anchor": "a", "values": {"metric": 1e-9}, "tolerance": 1e-6, "pass": true, "runtime_ms": 1.0, "error": null},
        {"name": "bad", "anchor": "a", "values": {"metric": 0.5}, "tolerance": 1e-6, "pass": false, "runtime_ms": 1.0, "error": null}]}"#;
    let p = dir.path().join("rep.json");
    std::fs::write(&p, rep).unwrap();
    let o = scri(&["render", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL") && l.contains("bad")));
    let o = scri(&["render", "--in", dir.path().join("rep.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_worker_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"suite": "geometry-embedding"}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_scri")).args(["run", "--config", &cfg]).env("SCRI_WORKERS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
