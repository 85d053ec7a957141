//! The catalog of estimands.
//!
//! Every estimand follows the same recipe: write the target as a smooth
//! functional of quantities with a known asymptotic covariance, differentiate
//! the functional at the plug-in estimate, and turn `∇ᵀ Σ ∇` into a standard
//! error and a Wald interval. [`delta_method`] is that recipe in its generic
//! form; the functions re-exported here specialize it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::autodiff::{evaluate, gradient, Dual, Gradient};
use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::stats::{check_level, ConfidenceInterval, InfluenceCurve, VarianceConvention};

pub mod closed_form;
pub mod functionals;
mod moments;
mod quantile;
mod regression;
mod risk;

pub use moments::{correlation_inference, mean_inference, ratio_of_means_inference, DENOMINATOR_GUARD};
pub use quantile::{quantile_inference, sample_quantile, DENSITY_FLOOR, MIN_QUANTILE_N};
pub use regression::{regression_rr_from_sample, regression_rr_inference};
pub use risk::{
    attributable_fraction, attributable_fraction_diagnostic, risk_ratio_inference, AfOptions, AfReport,
    AF_DIVERGENCE_THRESHOLD, AF_FLOOR, POSITIVITY_RULE,
};

/// Outcome of one application of the delta method.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaMethod {
    pub estimate: f64,
    pub gradient: Gradient,
    pub variance: f64,
    pub se: f64,
}

/// Propagates the covariance `sigma` of an estimate `point` through the
/// functional `f`: `Var[f(θ̂)] ≈ ∇f(θ̂)ᵀ Σ ∇f(θ̂)`.
///
/// ```
/// use delta_inference::autodiff::Dual;
/// use delta_inference::estimands::delta_method;
///
/// // X̄/Ȳ with Var(X̄) = Var(Ȳ) = 0.01 and no covariance
/// let sigma = vec![vec![0.01, 0.0], vec![0.0, 0.01]];
/// let d = delta_method(|m: &[Dual]| m[0] / m[1], &[3.0, 4.0], &sigma).unwrap();
/// assert_eq!(d.estimate, 0.75);
/// assert!((d.variance - 0.01 * (0.25f64.powi(2) + 0.1875f64.powi(2))).abs() < 1e-15);
/// ```
pub fn delta_method<F>(f: F, point: &[f64], sigma: &[Vec<f64>]) -> Result<DeltaMethod>
where
    F: Fn(&[Dual]) -> Dual,
{
    let g = gradient(&f, point)?;
    let variance = g.quadratic_form(sigma)?.max(0.0);
    Ok(DeltaMethod { estimate: evaluate(&f, point), se: variance.sqrt(), variance, gradient: g })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimandKind {
    Mean,
    RatioOfMeans,
    RiskRatio,
    Quantile,
    Correlation,
    RegressionRr,
    AttributableFraction,
}

impl EstimandKind {
    pub fn tag(self) -> &'static str {
        match self {
            EstimandKind::Mean => "mean",
            EstimandKind::RatioOfMeans => "ratio-of-means",
            EstimandKind::RiskRatio => "risk-ratio",
            EstimandKind::Quantile => "quantile",
            EstimandKind::Correlation => "correlation",
            EstimandKind::RegressionRr => "regression-rr",
            EstimandKind::AttributableFraction => "attributable-fraction",
        }
    }
}

impl fmt::Display for EstimandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Where the quantile estimand gets `f(q)` from.
#[derive(Clone)]
pub enum DensitySource {
    /// Epanechnikov KDE; `None` selects the default rule-of-thumb bandwidth.
    Kde { bandwidth: Option<f64> },
    /// A known density, for isolating the variance formula from KDE error.
    Known(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Default for DensitySource {
    fn default() -> Self {
        DensitySource::Kde { bandwidth: None }
    }
}

impl fmt::Debug for DensitySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensitySource::Kde { bandwidth } => f.debug_struct("Kde").field("bandwidth", bandwidth).finish(),
            DensitySource::Known(_) => f.write_str("Known(<fn>)"),
        }
    }
}

/// Which functional to apply, and how.
///
/// `columns` binds sample columns by position: `[x]` for the mean and
/// quantile, `[x, y]` (numerator first) for ratio and correlation, and
/// `[response, covariates…]` for the regression risk ratio. Left empty, the
/// natural default for the kind is used.
#[derive(Debug, Clone)]
pub struct EstimandSpec {
    pub kind: EstimandKind,
    pub level: f64,
    pub convention: VarianceConvention,
    pub probability: Option<f64>,
    pub density: DensitySource,
    pub profiles: Option<(Vec<f64>, Vec<f64>)>,
    pub columns: Vec<usize>,
    /// Multiple of `sd(Y)/√n` below which a ratio denominator counts as zero.
    pub denominator_guard: f64,
}

impl EstimandSpec {
    pub fn new(kind: EstimandKind) -> Self {
        Self {
            kind,
            level: 0.95,
            convention: VarianceConvention::default(),
            probability: None,
            density: DensitySource::default(),
            profiles: None,
            columns: Vec::new(),
            denominator_guard: DENOMINATOR_GUARD,
        }
    }

    pub fn mean() -> Self {
        Self::new(EstimandKind::Mean)
    }

    pub fn ratio_of_means() -> Self {
        Self::new(EstimandKind::RatioOfMeans)
    }

    pub fn risk_ratio() -> Self {
        Self::new(EstimandKind::RiskRatio)
    }

    pub fn quantile(p: f64) -> Self {
        Self { probability: Some(p), ..Self::new(EstimandKind::Quantile) }
    }

    pub fn correlation() -> Self {
        Self::new(EstimandKind::Correlation)
    }

    /// Risk ratio `P(Y=1 | profile_a) / P(Y=1 | profile_b)`; profiles include
    /// the intercept entry.
    pub fn regression_rr(profile_a: Vec<f64>, profile_b: Vec<f64>) -> Self {
        Self { profiles: Some((profile_a, profile_b)), ..Self::new(EstimandKind::RegressionRr) }
    }

    pub fn attributable_fraction() -> Self {
        Self::new(EstimandKind::AttributableFraction)
    }

    pub fn with_level(mut self, level: f64) -> Self {
        self.level = level;
        self
    }

    pub fn with_convention(mut self, convention: VarianceConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_columns(mut self, columns: Vec<usize>) -> Self {
        self.columns = columns;
        self
    }

    pub fn with_denominator_guard(mut self, guard: f64) -> Self {
        self.denominator_guard = guard;
        self
    }

    pub fn with_bandwidth(mut self, bandwidth: f64) -> Self {
        self.density = DensitySource::Kde { bandwidth: Some(bandwidth) };
        self
    }

    pub fn with_known_density(mut self, density: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.density = DensitySource::Known(Arc::new(density));
        self
    }

    /// Checks the options relevant to `kind`.
    pub fn validate(&self) -> Result<()> {
        check_level(self.level)?;
        match self.kind {
            EstimandKind::Quantile => {
                let p = self
                    .probability
                    .ok_or_else(|| Error::InvalidOption("quantile needs a probability".into()))?;
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidProbability(p));
                }
                if let DensitySource::Kde { bandwidth: Some(h) } = self.density {
                    if !(h > 0.0 && h.is_finite()) {
                        return Err(Error::InvalidBandwidth(h));
                    }
                }
            }
            EstimandKind::RegressionRr => {
                let (a, b) = self
                    .profiles
                    .as_ref()
                    .ok_or_else(|| Error::InvalidOption("regression risk ratio needs two profiles".into()))?;
                if a.is_empty() {
                    return Err(Error::EmptyPoint);
                }
                if a.len() != b.len() {
                    return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
                }
                if a.iter().chain(b).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidOption("profiles must be finite".into()));
                }
            }
            EstimandKind::RatioOfMeans if !(self.denominator_guard >= 0.0) => {
                return Err(Error::InvalidOption(format!(
                    "denominator guard {} must be non-negative",
                    self.denominator_guard
                )));
            }
            _ => {}
        }
        Ok(())
    }

    pub(crate) fn column_or(&self, position: usize, default: usize) -> usize {
        self.columns.get(position).copied().unwrap_or(default)
    }

    /// Runs the estimand on a sample. Summary-statistic estimands (risk
    /// ratio, attributable fraction) are rejected.
    pub fn evaluate(&self, sample: &Sample) -> Result<InferenceResult> {
        match self.kind {
            EstimandKind::Mean => mean_inference(sample, self),
            EstimandKind::RatioOfMeans => ratio_of_means_inference(sample, self),
            EstimandKind::Correlation => correlation_inference(sample, self),
            EstimandKind::Quantile => {
                self.validate()?;
                quantile_inference(sample, self.probability.unwrap_or(0.5), self)
            }
            EstimandKind::RegressionRr => regression_rr_from_sample(sample, self),
            EstimandKind::RiskRatio | EstimandKind::AttributableFraction => {
                Err(Error::NotSampleBased(self.kind.tag()))
            }
        }
    }
}

/// Point estimate, standard error and interval for one estimand.
///
/// `se` is on the working scale named by `ci.scale`: for log-scale
/// intervals it is the standard error of the log estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferenceResult {
    pub estimand: EstimandKind,
    pub method: String,
    pub estimate: f64,
    pub se: f64,
    pub ci: ConfidenceInterval,
    pub n: usize,
    #[serde(skip)]
    pub influence_curve: Option<InfluenceCurve>,
    pub diagnostics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl InferenceResult {
    pub(crate) fn new(
        estimand: EstimandKind,
        method: &str,
        estimate: f64,
        se: f64,
        ci: ConfidenceInterval,
        n: usize,
    ) -> Self {
        Self {
            estimand,
            method: method.to_owned(),
            estimate,
            se,
            ci,
            n,
            influence_curve: None,
            diagnostics: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub(crate) fn with_curve(mut self, curve: InfluenceCurve) -> Self {
        self.influence_curve = Some(curve);
        self
    }

    pub(crate) fn note(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_owned(), value);
        self
    }
}

/// Sample covariance matrix of several equal-length columns.
pub(crate) fn covariance_matrix(columns: &[&[f64]], convention: VarianceConvention) -> Result<Vec<Vec<f64>>> {
    let k = columns.len();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let c = crate::stats::covariance(columns[i], columns[j], convention)?;
            out[i][j] = c;
            out[j][i] = c;
        }
    }
    Ok(out)
}

pub(crate) fn scale_matrix(mut m: Vec<Vec<f64>>, by: f64) -> Vec<Vec<f64>> {
    m.iter_mut().flatten().for_each(|v| *v *= by);
    m
}
