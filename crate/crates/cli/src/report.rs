//! Rendering of results as JSON, CSV or plain text.
//!
//! JSON numbers use the shortest decimal that parses back to the same
//! `f64`, so a report round-trips bit for bit. Plain text shows six decimals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use delta_inference::estimands::AfReport;
use delta_inference::resample::{BootstrapResult, CltReport, KsRow};
use delta_inference::{ConfidenceInterval, InferenceResult, Scale};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapSummary {
    pub se: f64,
    pub ci: ConfidenceInterval,
    pub replicates: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub estimand: String,
    pub method: String,
    pub estimate: f64,
    pub se: f64,
    pub ci: ConfidenceInterval,
    pub n: usize,
    pub scale_note: String,
    pub warnings: Vec<String>,
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn scale_note(scale: Scale) -> &'static str {
    match scale {
        Scale::Natural => "se and interval on the natural scale",
        Scale::Log => "se is for the log estimate; interval exponentiated from the log scale",
    }
}

impl Report {
    pub fn new(result: InferenceResult, boot: Option<BootstrapResult>, seed: Option<u64>) -> Self {
        Self {
            estimand: result.estimand.tag().to_owned(),
            method: result.method,
            estimate: result.estimate,
            se: result.se,
            ci: result.ci,
            n: result.n,
            scale_note: scale_note(result.ci.scale).to_owned(),
            warnings: result.warnings,
            diagnostics: result.diagnostics,
            bootstrap: boot.map(|b| BootstrapSummary {
                se: b.se,
                ci: b.percentile_ci,
                replicates: b.replicates,
                failures: b.failures,
            }),
            seed,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => self.csv(),
            Format::Plain => self.plain(),
        }
    }

    fn csv(&self) -> String {
        let mut header = vec!["estimand", "method", "estimate", "se", "ci_lower", "ci_upper", "level", "scale", "n"];
        let mut row = vec![
            self.estimand.clone(),
            self.method.clone(),
            num(self.estimate),
            num(self.se),
            num(self.ci.lower),
            num(self.ci.upper),
            num(self.ci.level),
            self.ci.scale.to_string(),
            self.n.to_string(),
        ];
        if let Some(b) = &self.bootstrap {
            header.extend(["bootstrap_se", "bootstrap_lower", "bootstrap_upper", "bootstrap_replicates"]);
            row.extend([num(b.se), num(b.ci.lower), num(b.ci.upper), b.replicates.to_string()]);
        }
        if let Some(seed) = self.seed {
            header.push("seed");
            row.push(seed.to_string());
        }
        header.push("warnings");
        row.push(self.warnings.join("; "));
        csv_lines(&[header.iter().map(|s| s.to_string()).collect(), row])
    }

    fn plain(&self) -> String {
        let mut s = String::new();
        let pct = self.ci.level * 100.0;
        let _ = writeln!(s, "estimand   {}", self.estimand);
        let _ = writeln!(s, "method     {}", self.method);
        let _ = writeln!(s, "n          {}", self.n);
        let _ = writeln!(s, "estimate   {:.6}", self.estimate);
        let _ = writeln!(s, "se         {:.6}", self.se);
        let _ = writeln!(s, "{pct}% CI    [{:.6}, {:.6}]  ({})", self.ci.lower, self.ci.upper, self.ci.scale);
        if let Some(b) = &self.bootstrap {
            let _ = writeln!(s, "bootstrap  se {:.6}, {pct}% percentile CI [{:.6}, {:.6}], B = {}", b.se, b.ci.lower, b.ci.upper, b.replicates);
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed       {seed}");
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

/// Shortest round-trip decimal.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_lines(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub(crate) fn render_af(report: &AfReport, format: Format) -> String {
    match format {
        Format::Json => json(report),
        Format::Csv => csv_lines(&[
            ["estimate", "derivative", "delta_se", "monte_carlo_se", "divergence_ratio", "warning", "draws", "seed"]
                .map(String::from)
                .to_vec(),
            vec![
                num(report.estimate),
                num(report.derivative),
                num(report.delta_se),
                num(report.monte_carlo_se),
                num(report.divergence_ratio),
                report.warning.to_string(),
                report.draws.to_string(),
                report.seed.to_string(),
            ],
        ]),
        Format::Plain => {
            let mut s = String::new();
            let _ = writeln!(s, "attributable fraction  {:.6}", report.estimate);
            let _ = writeln!(s, "derivative             {:.6}", report.derivative);
            let _ = writeln!(s, "delta-method se        {:.6}", report.delta_se);
            let _ = writeln!(s, "monte-carlo se         {:.6}", report.monte_carlo_se);
            let _ = writeln!(s, "ratio                  {:.6}", report.divergence_ratio);
            if report.warning {
                let _ = writeln!(s, "warning: delta-method SE understates the spread; the linearization is unreliable here");
            }
            s
        }
    }
}

#[derive(Serialize)]
struct CltSummaryRow {
    n: usize,
    mean_ks: f64,
}

#[derive(Serialize)]
struct CltJson<'a> {
    distribution: String,
    replicates: usize,
    repeats: usize,
    seed: u64,
    summary: Vec<CltSummaryRow>,
    rows: &'a [KsRow],
}

fn distribution_tag(report: &CltReport) -> String {
    use delta_inference::resample::Distribution1d::*;
    match report.distribution {
        Poisson { lambda } => format!("poisson({lambda})"),
        Uniform => "uniform".into(),
        Bernoulli { p } => format!("bernoulli({p})"),
    }
}

pub(crate) fn render_clt(report: &CltReport, repeats: usize, format: Format) -> String {
    let summary: Vec<CltSummaryRow> =
        report.summary().into_iter().map(|(n, mean_ks)| CltSummaryRow { n, mean_ks }).collect();
    match format {
        Format::Json => json(&CltJson {
            distribution: distribution_tag(report),
            replicates: report.replicates,
            repeats,
            seed: report.seed,
            summary,
            rows: &report.rows,
        }),
        Format::Csv => {
            let mut rows = vec![["n", "repeat", "ks"].map(String::from).to_vec()];
            rows.extend(report.rows.iter().map(|r| vec![r.n.to_string(), r.repeat.to_string(), num(r.ks)]));
            csv_lines(&rows)
        }
        Format::Plain => {
            let mut s = format!(
                "{}: {} replicates x {} repeats, seed {}\n{:>8}  {:>10}\n",
                distribution_tag(report),
                report.replicates,
                repeats,
                report.seed,
                "n",
                "mean KS"
            );
            for row in summary {
                let _ = writeln!(s, "{:>8}  {:>10.6}", row.n, row.mean_ks);
            }
            s
        }
    }
}
