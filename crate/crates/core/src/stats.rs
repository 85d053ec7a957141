//! Empirical distribution machinery: moments, the eCDF, influence-curve
//! variance and Wald intervals.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::normal_quantile;
use crate::sample::Sample;

/// Denominator used when turning squared deviations into a variance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceConvention {
    /// `1/n`, the plug-in estimator.
    Population,
    /// `1/(n-1)`, the usual sample variance.
    #[default]
    Unbiased,
}

impl VarianceConvention {
    fn min_n(self) -> usize {
        match self {
            VarianceConvention::Population => 1,
            VarianceConvention::Unbiased => 2,
        }
    }

    fn divisor(self, n: usize) -> f64 {
        match self {
            VarianceConvention::Population => n as f64,
            VarianceConvention::Unbiased => (n - 1) as f64,
        }
    }
}

impl fmt::Display for VarianceConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarianceConvention::Population => "population",
            VarianceConvention::Unbiased => "unbiased",
        })
    }
}

impl std::str::FromStr for VarianceConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "population" => Ok(Self::Population),
            "unbiased" => Ok(Self::Unbiased),
            other => Err(Error::InvalidOption(format!("unknown variance convention {other:?}"))),
        }
    }
}

/// Arithmetic mean, refined by a second pass over the residuals so that
/// deviations from it sum to zero as closely as rounding allows.
pub fn mean(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let first = values.iter().sum::<f64>() / n;
    first + values.iter().map(|v| v - first).sum::<f64>() / n
}

/// Sample covariance of two equal-length slices under `convention`.
pub fn covariance(x: &[f64], y: &[f64], convention: VarianceConvention) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let n = x.len();
    if n < convention.min_n() {
        return Err(Error::InsufficientSample { needed: convention.min_n(), got: n });
    }
    let (mx, my) = (mean(x), mean(y));
    let s: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(s / convention.divisor(n))
}

pub fn variance(x: &[f64], convention: VarianceConvention) -> Result<f64> {
    covariance(x, x, convention)
}

/// Type-7 (linear interpolation) quantile of already sorted data.
pub(crate) fn sorted_quantile(sorted: &[f64], prob: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub(crate) fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Per-observation influence values of a fitted estimand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceCurve {
    values: Vec<f64>,
    estimand: String,
    convention: VarianceConvention,
}

impl InfluenceCurve {
    pub fn new(values: Vec<f64>, estimand: impl Into<String>, convention: VarianceConvention) -> Self {
        Self { values, estimand: estimand.into(), convention }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn estimand(&self) -> &str {
        &self.estimand
    }

    pub fn convention(&self) -> VarianceConvention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    pub fn with_convention(mut self, convention: VarianceConvention) -> Self {
        self.convention = convention;
        self
    }
}

/// Variance of the estimator (its squared standard error) from its
/// influence curve.
///
/// Population: `(1/n)·(1/n)·Σ IFᵢ²`, which treats the curve as known to be
/// centred. Unbiased: `(1/n)·(1/(n-1))·Σ (IFᵢ - mean)²`.
pub fn if_variance(curve: &InfluenceCurve) -> Result<f64> {
    let n = curve.len();
    let needed = curve.convention.min_n();
    if n < needed {
        return Err(Error::InsufficientSample { needed, got: n });
    }
    let nf = n as f64;
    let v = match curve.convention {
        VarianceConvention::Population => curve.values.iter().map(|v| v * v).sum::<f64>() / nf,
        VarianceConvention::Unbiased => variance(&curve.values, VarianceConvention::Unbiased)?,
    };
    Ok(v / nf)
}

/// Scale on which a Wald interval was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Natural,
    /// Built on the log scale, then exponentiated.
    Log,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Natural => "natural",
            Scale::Log => "log",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub scale: Scale,
}

impl ConfidenceInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

pub(crate) fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(level))
    }
}

/// Two-sided critical value `z_{(1+level)/2}`.
pub fn critical_value(level: f64) -> Result<f64> {
    check_level(level)?;
    normal_quantile(0.5 + level / 2.0)
}

/// `estimate ± z·se` on the natural scale.
pub fn wald_ci(estimate: f64, se: f64, level: f64) -> Result<ConfidenceInterval> {
    if !(se >= 0.0 && se.is_finite()) {
        return Err(Error::InvalidStandardError(se));
    }
    let z = critical_value(level)?;
    Ok(ConfidenceInterval {
        lower: estimate - z * se,
        upper: estimate + z * se,
        level,
        scale: Scale::Natural,
    })
}

/// Wald interval for a positive ratio built around `ln(estimate)` with
/// log-scale standard error `se_log`, then mapped back with `exp`.
pub fn wald_ci_log(estimate: f64, se_log: f64, level: f64) -> Result<ConfidenceInterval> {
    if !(estimate > 0.0) {
        return Err(Error::Domain(format!("log-scale interval needs a positive estimate, got {estimate}")));
    }
    wald_ci(estimate.ln(), se_log, level).map(|ci| ci.exponentiate())
}

impl ConfidenceInterval {
    /// Maps a log-scale interval back to the ratio scale.
    pub fn exponentiate(self) -> Self {
        Self { lower: self.lower.exp(), upper: self.upper.exp(), level: self.level, scale: Scale::Log }
    }
}

/// Empirical CDF `F_n(z) = #{xᵢ ≤ z} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientSample { needed: 1, got: 0 });
        }
        Ok(Self { sorted: sorted_copy(values) })
    }

    pub fn eval(&self, z: f64) -> f64 {
        let count = self.sorted.partition_point(|&x| x <= z);
        count as f64 / self.sorted.len() as f64
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }
}

pub fn ecdf(sample: &Sample, column: usize) -> Result<Ecdf> {
    Ecdf::new(sample.column(column)?)
}

/// The five raw moments of a paired sample plus derived (co)variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub n: usize,
    pub mean_xy: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub mean_x2: f64,
    pub mean_y2: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
    pub convention: VarianceConvention,
}

impl Moments {
    /// `(μ_XY, μ_X, μ_Y, μ_X², μ_Y²)`, the argument order of the
    /// correlation functional.
    pub fn raw(&self) -> [f64; 5] {
        [self.mean_xy, self.mean_x, self.mean_y, self.mean_x2, self.mean_y2]
    }
}

/// Plug-in moments of a width-2 sample. Variances are computed from centred
/// sums rather than `E[X²] - E[X]²`.
pub fn sample_moments(pairs: &Sample, convention: VarianceConvention) -> Result<Moments> {
    pairs.require_width(2)?;
    pairs.require_n(2)?;
    let x = pairs.column(0)?;
    let y = pairs.column(1)?;
    let nf = pairs.n() as f64;
    let avg = |f: &dyn Fn(f64, f64) -> f64| x.iter().zip(y).map(|(&a, &b)| f(a, b)).sum::<f64>() / nf;
    Ok(Moments {
        n: pairs.n(),
        mean_xy: avg(&|a, b| a * b),
        mean_x: mean(x),
        mean_y: mean(y),
        mean_x2: avg(&|a, _| a * a),
        mean_y2: avg(&|_, b| b * b),
        var_x: variance(x, convention)?,
        var_y: variance(y, convention)?,
        cov_xy: covariance(x, y, convention)?,
        convention,
    })
}
