//! `scri`: runs verification suites from a JSON config and renders reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scri::error::{Error, Result};
use scri::report::{report_parse, report_render, Format, VerificationReport};
use scri::suites::{self, ExperimentConfig, SUITES};

/// worker count for the suites; the only environment input
const WORKERS_VAR: &str = "SCRI_WORKERS";

#[derive(Parser)]
#[command(name = "scri", version, about = "Verification campaigns for holographic states on Minkowski spacetime")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a suite and print or write its report
    Run {
        #[arg(long)]
        config: PathBuf,
        /// overrides the suite named in the config
        #[arg(long)]
        suite: Option<String>,
        /// directory for `<suite>.<format>` and `<suite>.plot.csv`
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "table")]
        format: Format,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the available suites
    ListSuites,
    /// Re-render a saved report (json or csv, detected from the extension)
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "table")]
        format: Format,
    },
}

fn input_format(path: &Path) -> Result<Format> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Ok(Format::Json),
        Some("csv") => Ok(Format::Csv),
        _ => Err(Error::Config(format!("{}: expected a .json or .csv report", path.display()))),
    }
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Table => "txt",
    }
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::ListSuites => {
            for s in SUITES {
                println!("{s}");
            }
            Ok(true)
        }
        Cmd::Render { input, format } => {
            let text = std::fs::read_to_string(&input)?;
            let rep = report_parse(&text, input_format(&input)?)?;
            print!("{}", report_render(&rep, format)?);
            Ok(rep.passed())
        }
        Cmd::Run { config, suite, out, format, seed } => {
            if let Ok(v) = std::env::var(WORKERS_VAR) {
                let n = v.parse().map_err(|_| Error::Config(format!("{WORKERS_VAR}={v} is not a count")))?;
                suites::set_workers(n)?;
            }
            let text = std::fs::read_to_string(&config)?;
            let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
            if let Some(s) = suite {
                cfg.suite = s;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let rep: VerificationReport = suites::run(&cfg)?;
            let rendered = report_render(&rep, format)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join(format!("{}.{}", cfg.suite, extension(format))), &rendered)?;
                    std::fs::write(dir.join(format!("{}.plot.csv", cfg.suite)), suites::plot_data(&rep))?;
                    print!("{}", report_render(&rep, Format::Table)?);
                }
                None => print!("{rendered}"),
            }
            Ok(rep.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
