//! Structured verification records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One named check with its values and verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// quoted statement the check exercises
    pub anchor: String,
    pub values: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            values: BTreeMap::new(),
            tolerance,
            pass: false,
            runtime_ms: 0.0,
            error: None,
        }
    }

    /// Non-finite values are dropped so every report stays valid JSON.
    pub fn value(mut self, key: &str, v: f64) -> Self {
        if v.is_finite() {
            self.values.insert(key.to_string(), v);
        }
        self
    }

    /// Passes iff `metric <= tolerance`; the metric is stored under `"metric"`.
    pub fn judge(mut self, metric: f64) -> Self {
        self = self.value("metric", metric);
        self.pass = metric.is_finite() && metric <= self.tolerance;
        self
    }

    pub fn verdict(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn failed(mut self, err: impl std::fmt::Display) -> Self {
        self.error = Some(err.to_string());
        self.pass = false;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    pub metadata: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("tail_threshold".into(), format!("{:e}", crate::fields::TAIL));
        metadata.insert("crate_version".into(), env!("CARGO_PKG_VERSION").into());
        Self { suite: suite.into(), records: vec![], metadata }
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.records.extend(other.records);
    }

    /// Largest value stored under `key` across records.
    pub fn max_value(&self, key: &str) -> f64 {
        self.records.iter().filter_map(|r| r.values.get(key)).fold(f64::NEG_INFINITY, |a, b| a.max(*b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}`; expected table, csv or json"))),
        }
    }
}

const CSV_HEADER: [&str; 10] = ["kind", "index", "name", "anchor", "tolerance", "pass", "runtime_ms", "error", "key", "value"];

/// Renders a report. JSON and CSV round-trip through [`report_parse`]; the table is for people.
pub fn report_render(rep: &VerificationReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(rep)?),
        Format::Csv => render_csv(rep),
        Format::Table => Ok(render_table(rep)),
    }
}

pub fn report_parse(text: &str, format: Format) -> Result<VerificationReport> {
    match format {
        Format::Json => Ok(serde_json::from_str(text)?),
        Format::Csv => parse_csv(text),
        Format::Table => Err(Error::Parse("table output is not machine readable".into())),
    }
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("csv: {e}"))
}

// long format: one `suite` row, `meta` rows, then a `record` row followed by its `value` rows
fn render_csv(rep: &VerificationReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    w.write_record(["suite", "", &rep.suite, "", "", "", "", "", "", ""]).map_err(csv_err)?;
    for (k, v) in &rep.metadata {
        w.write_record(["meta", "", "", "", "", "", "", "", k, v]).map_err(csv_err)?;
    }
    for (i, r) in rep.records.iter().enumerate() {
        let idx = i.to_string();
        w.write_record([
            "record",
            &idx,
            &r.name,
            &r.anchor,
            &r.tolerance.to_string(),
            &r.pass.to_string(),
            &r.runtime_ms.to_string(),
            r.error.as_deref().unwrap_or(""),
            if r.error.is_some() { "error" } else { "" },
            "",
        ])
        .map_err(csv_err)?;
        for (k, v) in &r.values {
            w.write_record(["value", &idx, "", "", "", "", "", "", k, &v.to_string()]).map_err(csv_err)?;
        }
    }
    String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
}

fn parse_csv(text: &str) -> Result<VerificationReport> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse("unexpected csv header".into()));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("number `{s}`: {e}")));
    let mut rep = VerificationReport { suite: String::new(), records: vec![], metadata: BTreeMap::new() };
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let f = |i: usize| row.get(i).unwrap_or("");
        match f(0) {
            "suite" => rep.suite = f(2).to_string(),
            "meta" => {
                rep.metadata.insert(f(8).to_string(), f(9).to_string());
            }
            "record" => {
                let mut r = CheckRecord::new(f(2), f(3), num(f(4))?);
                r.pass = f(5) == "true";
                r.runtime_ms = num(f(6))?;
                r.error = (f(8) == "error").then(|| f(7).to_string());
                rep.records.push(r);
            }
            "value" => {
                let idx: usize = f(1).parse().map_err(|_| Error::Parse(format!("index `{}`", f(1))))?;
                let r = rep.records.get_mut(idx).ok_or_else(|| Error::Parse(format!("value row for missing record {idx}")))?;
                r.values.insert(f(8).to_string(), num(f(9))?);
            }
            k => return Err(Error::Parse(format!("unknown row kind `{k}`"))),
        }
    }
    Ok(rep)
}

fn render_table(rep: &VerificationReport) -> String {
    let width = rep.records.iter().map(|r| r.name.chars().count()).max().unwrap_or(4).max(4);
    let mut out = format!("suite: {}\n", rep.suite);
    out += &format!("{:<6} {:<width$} {:>12} {:>10} {:>10}\n", "result", "name", "metric", "tolerance", "ms");
    for r in &rep.records {
        let metric = r.values.get("metric").map(|m| format!("{m:.3e}")).unwrap_or_else(|| "-".into());
        let pad = width - r.name.chars().count();
        out += &format!(
            "{:<6} {}{} {:>12} {:>10.1e} {:>10.1}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            " ".repeat(pad),
            metric,
            r.tolerance,
            r.runtime_ms
        );
        if let Some(e) = &r.error {
            out += &format!("       error: {e}\n");
        }
    }
    let failed = rep.failures().count();
    out += &format!("{} checks, {} failed\n", rep.records.len(), failed);
    out
}
