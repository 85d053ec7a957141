//! Epanechnikov kernel density estimation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::stats::{sorted_copy, sorted_quantile, variance, VarianceConvention};

/// Ratio of the Epanechnikov and Gaussian canonical bandwidths; converts a
/// Gaussian rule-of-thumb bandwidth into an equivalent Epanechnikov one.
pub const EPANECHNIKOV_FACTOR: f64 = 2.214 / 1.059;

/// Epanechnikov kernel `0.75·(1 - u²)` on `|u| ≤ 1`.
pub fn epanechnikov(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        0.75 * (1.0 - u * u)
    } else {
        0.0
    }
}

/// Silverman's rule `0.9·min(sd, IQR/1.34)·n^{-1/5}`, scaled for the
/// Epanechnikov kernel. Falls back to `sd` when the IQR is zero.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InsufficientSample { needed: 2, got: values.len() });
    }
    let sd = variance(values, VarianceConvention::Unbiased)?.sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample);
    }
    let sorted = sorted_copy(values);
    let iqr = sorted_quantile(&sorted, 0.75) - sorted_quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * (values.len() as f64).powf(-0.2) * EPANECHNIKOV_FACTOR)
}

/// A fitted kernel density estimate. Immutable after fitting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    #[serde(skip)]
    sorted: Vec<f64>,
    bandwidth: f64,
    n: usize,
}

impl DensityEstimate {
    pub fn from_values(values: &[f64], bandwidth: Option<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InsufficientSample { needed: 2, got: values.len() });
        }
        if let Some(h) = bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidBandwidth(h));
            }
        }
        let sorted = sorted_copy(values);
        if sorted[0] == sorted[sorted.len() - 1] {
            return Err(Error::DegenerateSample);
        }
        let bandwidth = match bandwidth {
            Some(h) => h,
            None => silverman_bandwidth(values)?,
        };
        Ok(Self { sorted, bandwidth, n: values.len() })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `f̂(x) = (1/(n·h)) Σ K((x - xᵢ)/h)`; only points within `h` of `x`
    /// contribute.
    pub fn evaluate(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let lo = self.sorted.partition_point(|&v| v < x - h);
        let hi = self.sorted.partition_point(|&v| v <= x + h);
        let sum: f64 = self.sorted[lo..hi].iter().map(|&v| epanechnikov((x - v) / h)).sum();
        sum / (self.n as f64 * h)
    }

    /// The interval outside which the estimate is identically zero.
    pub fn support(&self) -> (f64, f64) {
        (self.sorted[0] - self.bandwidth, self.sorted[self.n - 1] + self.bandwidth)
    }
}

/// Fits a KDE to a width-1 sample.
pub fn fit_kde(sample: &Sample, bandwidth: Option<f64>) -> Result<DensityEstimate> {
    sample.require_width(1)?;
    DensityEstimate::from_values(sample.column(0)?, bandwidth)
}

pub fn evaluate(estimate: &DensityEstimate, x: f64) -> f64 {
    estimate.evaluate(x)
}
