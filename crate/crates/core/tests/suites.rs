use scri::report::*;
use scri::suites::{plot_data, run, ExperimentConfig, SUITES};

fn sample_report() -> VerificationReport {
    let mut rep = VerificationReport::new("demo");
    rep.metadata.insert("seed".into(), "7".into());
    rep.push(CheckRecord::new("a, with comma", "quote \"here\"", 1e-6).value("x", 0.1 + 0.2).judge(3.5e-7));
    rep.push(CheckRecord::new("b", "anchor", 1e-3).judge(2.0));
    rep.push(CheckRecord::new("c", "anchor", 1e-3).failed("quadrature did not converge"));
    rep.records[0].runtime_ms = 12.25;
    rep
}

fn strip_runtime(mut rep: VerificationReport) -> VerificationReport {
    for r in &mut rep.records {
        r.runtime_ms = 0.0;
    }
    rep
}

#[test]
fn json_and_csv_round_trip() {
    let rep = sample_report();
    let json = report_render(&rep, Format::Json).unwrap();
    let back = report_parse(&json, Format::Json).unwrap();
    assert_eq!(back, rep);
    let csv = report_render(&back, Format::Csv).unwrap();
    let again = report_parse(&csv, Format::Csv).unwrap();
    assert_eq!(again, rep);
    assert_eq!(report_render(&again, Format::Json).unwrap(), json);
}

#[test]
fn table_lists_each_record() {
    let rep = sample_report();
    let t = report_render(&rep, Format::Table).unwrap();
    assert_eq!(t.lines().filter(|l| l.starts_with("PASS")).count(), 1);
    assert_eq!(t.lines().filter(|l| l.starts_with("FAIL")).count(), 2);
    assert!(t.contains("3 checks, 2 failed"));
    assert!(report_parse(&t, Format::Table).is_err());
    let empty = VerificationReport::new("none");
    assert!(report_render(&empty, Format::Table).unwrap().contains("0 checks, 0 failed"));
    assert_eq!(report_parse(&report_render(&empty, Format::Csv).unwrap(), Format::Csv).unwrap(), empty);
    assert!("yaml".parse::<Format>().is_err());
}

#[test]
fn failed_and_non_finite_records_do_not_pass() {
    let r = CheckRecord::new("n", "a", 1.0).judge(f64::NAN);
    assert!(!r.pass);
    let rep = sample_report();
    assert!(!rep.passed());
    assert_eq!(rep.failures().count(), 2);
    let plot = plot_data(&rep);
    assert_eq!(plot.lines().count(), 4);
}

#[test]
fn configs_are_validated() {
    assert_eq!(SUITES.len(), 10);
    for s in SUITES {
        ExperimentConfig::for_suite(s).validate().unwrap();
    }
    assert!(matches!(ExperimentConfig::for_suite("nope").validate(), Err(scri::error::Error::UnknownSuite { .. })));
    let mut bad = ExperimentConfig::for_suite("positivity");
    bad.kernel.epsilon = vec![0.1];
    assert!(bad.validate().is_err());
    let text = r#"{"suite": "positivity", "seed": 3, "bogus": 1}"#;
    assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    let ok: ExperimentConfig = serde_json::from_str(r#"{"suite": "positivity", "seed": 3}"#).unwrap();
    assert_eq!(ok.seed, 3);
    assert!(run(&ExperimentConfig::for_suite("nope")).is_err());
}

#[test]
fn runs_are_deterministic() {
    let cfg = ExperimentConfig::for_suite("quasifree-engine");
    let a = strip_runtime(run(&cfg).unwrap());
    let b = strip_runtime(run(&cfg).unwrap());
    assert_eq!(a, b);
    assert!(a.passed());
    let g = ExperimentConfig::for_suite("geometry-embedding");
    assert_eq!(strip_runtime(run(&g).unwrap()), strip_runtime(run(&g).unwrap()));
}

#[test]
fn tolerance_overrides_take_effect() {
    let mut cfg = ExperimentConfig::for_suite("gx-obstruction");
    cfg.cases = Some(4);
    let rep = run(&cfg).unwrap();
    assert!(rep.passed());
    cfg.tolerances.insert("gx-obstruction".into(), 0.0);
    assert!(run(&cfg).is_err());
    cfg.tolerances.insert("gx-obstruction".into(), 1e-300);
    let strict = run(&cfg).unwrap();
    assert!(strict.records.iter().any(|r| r.tolerance == 1e-300));
}
