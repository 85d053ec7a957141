//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use delta_inference::estimands::{AfOptions, AF_DIVERGENCE_THRESHOLD};
use delta_inference::resample::CltConfig;
use delta_inference::{EstimandSpec, VarianceConvention};

use crate::{parse_distribution, parse_profiles, CliError, DataSource, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "deltainf", version, about = "Delta-method and influence-function inference")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate, standard error and Wald interval for one estimand.
    Infer {
        #[command(subcommand)]
        estimand: InferCommand,
    },
    /// Checks on when the linearization can be trusted.
    Diagnose {
        #[command(subcommand)]
        which: DiagnoseCommand,
    },
    /// Simulation experiments.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum InferCommand {
    /// Sample mean.
    Mean(SampleArgs),
    /// Ratio of two means, numerator column first.
    Ratio(SampleArgs),
    /// Risk ratio of two proportions, interval on the log scale.
    RiskRatio(RiskRatioArgs),
    /// Sample quantile, density at the quantile by Epanechnikov KDE.
    Quantile(QuantileArgs),
    /// Pearson correlation.
    Correlation(SampleArgs),
    /// Risk ratio between two covariate profiles of a logistic regression.
    RegressionRr(RegressionArgs),
}

#[derive(Debug, Subcommand)]
pub enum DiagnoseCommand {
    /// Delta-method vs Monte-Carlo SE of the attributable fraction 1 - e^{-x/θ}.
    Af(AfArgs),
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// KS distance between standardized sample means and the normal law.
    Clt(CltArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Unbiased,
    Population,
}

impl From<ConventionArg> for VarianceConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Unbiased => VarianceConvention::Unbiased,
            ConventionArg::Population => VarianceConvention::Population,
        }
    }
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Confidence level of the interval.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Unbiased)]
    pub variance_convention: ConventionArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Header names to use, comma separated, in the estimand's column order.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// Also run a nonparametric bootstrap with this many replicates.
    #[arg(long, value_name = "B")]
    pub bootstrap: Option<usize>,
    /// Write the influence curve to this CSV file.
    #[arg(long, value_name = "PATH")]
    pub export_if: Option<PathBuf>,
    /// Multiple of sd(Y)/√n below which a ratio denominator counts as zero.
    #[arg(long)]
    pub denominator_guard: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct QuantileArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[command(flatten)]
    pub sample: SampleArgs,
}

#[derive(Debug, Args)]
pub struct RegressionArgs {
    /// Two profiles including the intercept, e.g. `1,1,0/1,0,1`.
    #[arg(long)]
    pub profiles: String,
    #[command(flatten)]
    pub sample: SampleArgs,
}

#[derive(Debug, Args)]
pub struct RiskRatioArgs {
    #[arg(long)]
    pub p1: f64,
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub p2: f64,
    #[arg(long)]
    pub n2: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AfArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long)]
    pub se: f64,
    #[arg(long, default_value_t = 1.0)]
    pub exposure: f64,
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    #[arg(long, default_value_t = AF_DIVERGENCE_THRESHOLD)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CltArgs {
    /// `poisson(λ)`, `uniform` or `bernoulli(p)`.
    #[arg(long, default_value = "poisson(1)")]
    pub distribution: String,
    #[arg(long = "n", value_delimiter = ',', default_values_t = [10, 100, 1000, 10000])]
    pub n_values: Vec<usize>,
    #[arg(long, default_value_t = 2000)]
    pub replicates: usize,
    /// Independent repetitions averaged into the mean KS distance.
    #[arg(long, default_value_t = 200)]
    pub repeats: usize,
    #[command(flatten)]
    pub output: Output,
}

/// A parsed invocation, ready to run.
#[derive(Debug, Clone)]
pub enum Task {
    Infer(RunConfig),
    Af { theta: f64, se: f64, exposure: f64, options: AfOptions, format: Format },
    Clt { config: CltConfig, format: Format },
}

fn sample_config(args: SampleArgs, spec: EstimandSpec) -> RunConfig {
    let Common { level, variance_convention, output } = args.common;
    let mut spec = spec.with_level(level).with_convention(variance_convention.into());
    if let Some(guard) = args.denominator_guard {
        spec = spec.with_denominator_guard(guard);
    }
    RunConfig {
        source: DataSource::Csv(args.input),
        spec,
        columns: args.columns,
        format: output.format,
        seed: output.seed,
        bootstrap: args.bootstrap,
        export_if: args.export_if,
    }
}

impl Cli {
    pub fn into_task(self) -> Result<Task, CliError> {
        Ok(match self.command {
            Command::Infer { estimand } => Task::Infer(match estimand {
                InferCommand::Mean(a) => sample_config(a, EstimandSpec::mean()),
                InferCommand::Ratio(a) => sample_config(a, EstimandSpec::ratio_of_means()),
                InferCommand::Correlation(a) => sample_config(a, EstimandSpec::correlation()),
                InferCommand::Quantile(a) => {
                    let mut spec = EstimandSpec::quantile(a.p);
                    if let Some(h) = a.bandwidth {
                        spec = spec.with_bandwidth(h);
                    }
                    sample_config(a.sample, spec)
                }
                InferCommand::RegressionRr(a) => {
                    let (pa, pb) = parse_profiles(&a.profiles)?;
                    sample_config(a.sample, EstimandSpec::regression_rr(pa, pb))
                }
                InferCommand::RiskRatio(a) => RunConfig {
                    source: DataSource::Proportions { p1: a.p1, n1: a.n1, p2: a.p2, n2: a.n2 },
                    spec: EstimandSpec::risk_ratio()
                        .with_level(a.common.level)
                        .with_convention(a.common.variance_convention.into()),
                    columns: Vec::new(),
                    format: a.common.output.format,
                    seed: a.common.output.seed,
                    bootstrap: None,
                    export_if: None,
                },
            }),
            Command::Diagnose { which: DiagnoseCommand::Af(a) } => Task::Af {
                theta: a.theta,
                se: a.se,
                exposure: a.exposure,
                options: AfOptions { draws: a.draws, seed: a.output.seed.unwrap_or(0), threshold: a.threshold },
                format: a.output.format,
            },
            Command::Experiment { which: ExperimentCommand::Clt(a) } => Task::Clt {
                config: CltConfig {
                    distribution: parse_distribution(&a.distribution)?,
                    n_values: a.n_values,
                    replicates: a.replicates,
                    repeats: a.repeats,
                    seed: a.output.seed.unwrap_or(0),
                },
                format: a.output.format,
            },
        })
    }
}
