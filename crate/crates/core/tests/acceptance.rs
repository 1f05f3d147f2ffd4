//! One line per acceptance criterion, each backed by a full verification suite run from the
//! shipped configuration files.

use std::path::PathBuf;

use scri::suites::{run, ExperimentConfig, SUITES};

fn config(suite: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{suite}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

fn main() {
    let mut failed = vec![];
    for suite in SUITES {
        let cfg = config(suite);
        assert_eq!(cfg.suite, suite);
        let (ok, detail) = match run(&cfg) {
            Ok(rep) => {
                let n = rep.records.len();
                let bad = rep.failures().count();
                let worst = rep
                    .records
                    .iter()
                    .filter(|r| r.values.get("gated") != Some(&0.0))
                    .filter_map(|r| r.values.get("metric").map(|m| m / r.tolerance))
                    .fold(0.0f64, f64::max);
                (bad == 0 && n > 0, format!("{n} checks, {bad} failed, worst metric/tolerance {worst:.2e}"))
            }
            Err(e) => (false, format!("error: {e}")),
        };
        println!("{} {suite}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(suite);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
