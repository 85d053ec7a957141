//! Library half of the `deltainf` binary: argument parsing, CSV ingestion,
//! and report rendering. `main.rs` only wires these to the process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use delta_inference::estimands::{self, AfOptions};
use delta_inference::resample::{self, CltConfig, Distribution1d};
use delta_inference::{EstimandSpec, Sample};
use thiserror::Error;

pub mod args;
mod report;

pub use report::{Format, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] delta_inference::Error),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}, line {line}: {message}", path.display())]
    Csv { path: PathBuf, line: u64, message: String },
    #[error("{}: no data rows", path.display())]
    EmptyData { path: PathBuf },
    #[error("column {name:?} not in header {header:?}")]
    MissingColumn { name: String, header: Vec<String> },
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.category(),
            CliError::Io { .. } => "io",
            CliError::Csv { .. } => "csv",
            CliError::EmptyData { .. } => "empty-data",
            CliError::MissingColumn { .. } => "missing-column",
            CliError::Config(_) => "config",
        }
    }

    /// Process exit status for this error's category.
    pub fn exit_code(&self) -> i32 {
        exit_code(self.category())
    }
}

/// Every category the CLI can report, in exit-code order starting at 3
/// (1 is reserved for panics, 2 for argument-parsing errors).
pub const CATEGORIES: &[&str] = &[
    "io",
    "csv",
    "empty-data",
    "missing-column",
    "config",
    "empty-point",
    "dimension-mismatch",
    "domain",
    "insufficient-sample",
    "non-finite",
    "ragged-rows",
    "column-out-of-range",
    "invalid-probability",
    "invalid-level",
    "invalid-standard-error",
    "invalid-option",
    "denominator-near-zero",
    "boundary-proportion",
    "degenerate-density",
    "degenerate-variance",
    "degenerate-correlation",
    "non-positive-exposure",
    "degenerate-sample",
    "invalid-bandwidth",
    "rank-deficient",
    "separation",
    "invalid-response",
    "resample-instability",
    "too-few-replicates",
    "unsupported-distribution",
    "not-sample-based",
];

pub fn exit_code(category: &str) -> i32 {
    CATEGORIES.iter().position(|c| *c == category).map_or(1, |i| i as i32 + 3)
}

/// Reads a headed, comma-separated file of numbers into a [`Sample`] whose
/// columns carry the header names.
pub fn ingest_csv(path: &Path) -> Result<Sample, CliError> {
    let io = |e: &dyn std::fmt::Display| CliError::Io { path: path.to_owned(), message: e.to_string() };
    let text = fs::read_to_string(path).map_err(|e| io(&e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().map_err(|e| io(&e))?.iter().map(|h| h.trim().to_owned()).collect();
    let mut columns = vec![Vec::new(); header.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            let message = match e.kind() {
                csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                    format!("ragged row: {len} fields, header has {expected_len}")
                }
                _ => e.to_string(),
            };
            CliError::Csv { path: path.to_owned(), line, message }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        for (j, cell) in record.iter().enumerate() {
            let value = cell
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Csv {
                    path: path.to_owned(),
                    line,
                    message: format!("column {:?}: {cell:?} is not a finite number", header[j]),
                })?;
            columns[j].push(value);
        }
    }
    if columns.first().is_none_or(Vec::is_empty) {
        return Err(CliError::EmptyData { path: path.to_owned() });
    }
    Ok(Sample::named(header, columns)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv(PathBuf),
    /// Two observed proportions and their arm sizes.
    Proportions { p1: f64, n1: usize, p2: f64, n2: usize },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: DataSource,
    pub spec: EstimandSpec,
    /// Header names bound to the estimand's column slots; empty keeps the
    /// positional defaults.
    pub columns: Vec<String>,
    pub format: Format,
    pub seed: Option<u64>,
    pub bootstrap: Option<usize>,
    pub export_if: Option<PathBuf>,
}

fn bind_columns(sample: &Sample, names: &[String]) -> Result<Vec<usize>, CliError> {
    names
        .iter()
        .map(|name| {
            sample
                .column_index(name)
                .ok_or_else(|| CliError::MissingColumn { name: name.clone(), header: sample.names().to_vec() })
        })
        .collect()
}

/// Evaluates the configured estimand and returns the report.
pub fn infer(config: &RunConfig) -> Result<Report, CliError> {
    match &config.source {
        DataSource::Proportions { p1, n1, p2, n2 } => {
            if config.bootstrap.is_some() || config.export_if.is_some() {
                return Err(CliError::Config(
                    "--bootstrap and --export-if need sample data, not summary proportions".into(),
                ));
            }
            let result = estimands::risk_ratio_inference(*p1, *n1, *p2, *n2, &config.spec)?;
            Ok(Report::new(result, None, config.seed))
        }
        DataSource::Csv(path) => {
            let sample = ingest_csv(path)?;
            let mut spec = config.spec.clone();
            if !config.columns.is_empty() {
                spec.columns = bind_columns(&sample, &config.columns)?;
            }
            let result = spec.evaluate(&sample)?;
            if let Some(target) = &config.export_if {
                let curve = result.influence_curve.as_ref().ok_or_else(|| {
                    CliError::Config(format!("{} has no per-observation influence curve", result.estimand))
                })?;
                let mut out = String::from("row_index,influence_value\n");
                for (i, v) in curve.values().iter().enumerate() {
                    out.push_str(&format!("{i},{v:?}\n"));
                }
                fs::write(target, out).map_err(|e| CliError::Io { path: target.clone(), message: e.to_string() })?;
            }
            let boot = match config.bootstrap {
                Some(b) => Some(resample::bootstrap(&sample, &spec, b, config.seed.unwrap_or(0))?),
                None => None,
            };
            let seed = config.seed.or(boot.as_ref().map(|b| b.seed));
            Ok(Report::new(result, boot, seed))
        }
    }
}

/// `infer` followed by rendering to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let report = infer(config)?;
    write_out(out, &report.render(config.format))
}

pub fn run_af(theta: f64, se: f64, exposure: f64, options: &AfOptions, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let report = estimands::attributable_fraction_diagnostic(theta, se, exposure, options)?;
    write_out(out, &report::render_af(&report, format))
}

pub fn run_clt(config: &CltConfig, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let report = resample::clt_experiment(config)?;
    write_out(out, &report::render_clt(&report, config.repeats, format))
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| CliError::Io { path: "<stdout>".into(), message: e.to_string() })
}

pub fn parse_profiles(text: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let bad = || CliError::Config(format!("profiles {text:?} should look like 1,1,0/1,0,1"));
    let (a, b) = text.split_once('/').ok_or_else(bad)?;
    let parse = |s: &str| -> Result<Vec<f64>, CliError> {
        s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad())).collect()
    };
    Ok((parse(a)?, parse(b)?))
}

pub fn parse_distribution(text: &str) -> Result<Distribution1d, CliError> {
    Ok(text.parse::<Distribution1d>()?)
}
