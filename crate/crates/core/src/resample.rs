//! Resampling oracles: the nonparametric bootstrap, and a simulation of the
//! central limit theorem for sample means.
//!
//! Every replicate draws from its own ChaCha stream, selected by replicate
//! index under the master seed, so results do not depend on how rayon
//! schedules the work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimands::EstimandSpec;
use crate::normal::normal_cdf;
use crate::sample::Sample;
use crate::stats::{mean, sorted_copy, sorted_quantile, variance, ConfidenceInterval, Scale, VarianceConvention};

pub const MIN_REPLICATES: usize = 200;
/// Largest tolerated share of resamples on which the estimand may fail.
pub const MAX_FAILURE_RATE: f64 = 0.01;
pub const MIN_CLT_REPLICATES: usize = 100;

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub se: f64,
    pub percentile_ci: ConfidenceInterval,
    pub replicates: usize,
    pub failures: usize,
    pub estimand: String,
    pub seed: u64,
    #[serde(skip)]
    pub estimates: Vec<f64>,
}

/// Resamples rows with replacement `replicates` times and recomputes the
/// estimand on each. `se` is the standard deviation of the replicate
/// estimates (divisor `B-1`); the interval is their type-7 percentile range.
///
/// ```
/// use delta_inference::estimands::EstimandSpec;
/// use delta_inference::resample::bootstrap;
/// use delta_inference::Sample;
///
/// let s = Sample::univariate(vec![4.0; 10]).unwrap();
/// let b = bootstrap(&s, &EstimandSpec::mean(), 500, 7).unwrap();
/// assert_eq!(b.se, 0.0);
/// ```
pub fn bootstrap(sample: &Sample, spec: &EstimandSpec, replicates: usize, seed: u64) -> Result<BootstrapResult> {
    if replicates < MIN_REPLICATES {
        return Err(Error::TooFewReplicates { needed: MIN_REPLICATES, got: replicates });
    }
    spec.validate()?;
    let n = sample.n();
    let outcomes: Vec<Option<f64>> = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let resample = sample.select_rows(&rows).ok()?;
            spec.evaluate(&resample).ok().map(|r| r.estimate).filter(|v| v.is_finite())
        })
        .collect();

    let estimates: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let failures = replicates - estimates.len();
    if failures as f64 > MAX_FAILURE_RATE * replicates as f64 {
        return Err(Error::ResampleInstability { failures, replicates });
    }
    let se = variance(&estimates, VarianceConvention::Unbiased)?.sqrt();
    let sorted = sorted_copy(&estimates);
    let tail = (1.0 - spec.level) / 2.0;
    let percentile_ci = ConfidenceInterval {
        lower: sorted_quantile(&sorted, tail),
        upper: sorted_quantile(&sorted, 1.0 - tail),
        level: spec.level,
        scale: Scale::Natural,
    };
    Ok(BootstrapResult {
        se,
        percentile_ci,
        replicates,
        failures,
        estimand: spec.kind.tag().to_owned(),
        seed,
        estimates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Distribution1d {
    Poisson { lambda: f64 },
    Uniform,
    Bernoulli { p: f64 },
}

impl Distribution1d {
    pub fn mean(self) -> f64 {
        match self {
            Distribution1d::Poisson { lambda } => lambda,
            Distribution1d::Uniform => 0.5,
            Distribution1d::Bernoulli { p } => p,
        }
    }

    pub fn sd(self) -> f64 {
        match self {
            Distribution1d::Poisson { lambda } => lambda.sqrt(),
            Distribution1d::Uniform => (1.0f64 / 12.0).sqrt(),
            Distribution1d::Bernoulli { p } => (p * (1.0 - p)).sqrt(),
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Distribution1d::Poisson { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                Err(Error::UnsupportedDistribution(format!("poisson({lambda})")))
            }
            Distribution1d::Bernoulli { p } if !(p > 0.0 && p < 1.0) => {
                Err(Error::UnsupportedDistribution(format!("bernoulli({p})")))
            }
            _ => Ok(()),
        }
    }

    /// Mean of `n` i.i.d. draws. Poisson and Bernoulli sums are drawn
    /// directly from their exact sum distributions.
    fn sample_mean(self, n: usize, rng: &mut ChaCha8Rng) -> f64 {
        let nf = n as f64;
        match self {
            Distribution1d::Poisson { lambda } => {
                let total: f64 = Poisson::new(lambda * nf).expect("validated").sample(rng);
                total / nf
            }
            Distribution1d::Bernoulli { p } => Binomial::new(n as u64, p).expect("validated").sample(rng) as f64 / nf,
            Distribution1d::Uniform => (0..n).map(|_| rng.random::<f64>()).sum::<f64>() / nf,
        }
    }
}

impl std::str::FromStr for Distribution1d {
    type Err = Error;

    /// Parses `poisson`, `poisson(2.5)`, `uniform`, `bernoulli`, `bernoulli(0.3)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::UnsupportedDistribution(s.clone()))?;
                let v: f64 = inner.trim().parse().map_err(|_| Error::UnsupportedDistribution(s.clone()))?;
                (name.trim().to_owned(), Some(v))
            }
            None => (s.clone(), None),
        };
        let d = match (name.as_str(), arg) {
            ("poisson", a) => Distribution1d::Poisson { lambda: a.unwrap_or(1.0) },
            ("uniform", None) => Distribution1d::Uniform,
            ("bernoulli", a) => Distribution1d::Bernoulli { p: a.unwrap_or(0.5) },
            _ => return Err(Error::UnsupportedDistribution(s)),
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltConfig {
    pub distribution: Distribution1d,
    pub n_values: Vec<usize>,
    /// Draws of `Z_n` behind each KS distance.
    pub replicates: usize,
    /// Independent repetitions of the whole experiment, averaged by
    /// [`CltReport::mean_ks`].
    pub repeats: usize,
    pub seed: u64,
}

impl CltConfig {
    pub fn new(distribution: Distribution1d, n_values: Vec<usize>) -> Self {
        Self { distribution, n_values, replicates: 2000, repeats: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsRow {
    pub n: usize,
    pub repeat: usize,
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub distribution: Distribution1d,
    pub replicates: usize,
    pub seed: u64,
    pub rows: Vec<KsRow>,
}

impl CltReport {
    pub fn mean_ks(&self, n: usize) -> Option<f64> {
        let ks: Vec<f64> = self.rows.iter().filter(|r| r.n == n).map(|r| r.ks).collect();
        (!ks.is_empty()).then(|| mean(&ks))
    }

    /// `(n, mean KS)` in the order the sizes were requested.
    pub fn summary(&self) -> Vec<(usize, f64)> {
        let mut seen = Vec::new();
        for r in &self.rows {
            if !seen.contains(&r.n) {
                seen.push(r.n);
            }
        }
        seen.into_iter().filter_map(|n| self.mean_ks(n).map(|k| (n, k))).collect()
    }
}

/// Kolmogorov–Smirnov distance `sup |F_n - Φ|`.
pub fn ks_distance_to_normal(values: &[f64]) -> f64 {
    let sorted = sorted_copy(values);
    let m = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &z)| {
        let phi = normal_cdf(z);
        d.max((i + 1) as f64 / m - phi).max(phi - i as f64 / m)
    })
}

/// Simulates `Z_n = √n(X̄_n - μ)/σ` and measures its distance from the
/// standard normal for each requested `n`.
pub fn clt_experiment(config: &CltConfig) -> Result<CltReport> {
    config.distribution.validate()?;
    if config.replicates < MIN_CLT_REPLICATES {
        return Err(Error::TooFewReplicates { needed: MIN_CLT_REPLICATES, got: config.replicates });
    }
    if config.repeats == 0 {
        return Err(Error::InvalidOption("repeats must be positive".into()));
    }
    if config.n_values.iter().any(|&n| n == 0) {
        return Err(Error::InsufficientSample { needed: 1, got: 0 });
    }
    let d = config.distribution;
    let (mu, sigma) = (d.mean(), d.sd());
    let jobs: Vec<(usize, usize, usize)> = config
        .n_values
        .iter()
        .enumerate()
        .flat_map(|(k, &n)| (0..config.repeats).map(move |r| (k, n, r)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(k, n, repeat)| {
            let mut rng = stream(config.seed, (k * config.repeats + repeat) as u64);
            let root_n = (n as f64).sqrt();
            let z: Vec<f64> = (0..config.replicates)
                .map(|_| root_n * (d.sample_mean(n, &mut rng) - mu) / sigma)
                .collect();
            KsRow { n, repeat, ks: ks_distance_to_normal(&z) }
        })
        .collect();
    Ok(CltReport { distribution: d, replicates: config.replicates, seed: config.seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn requires_enough_replicates() {
        let s = Sample::univariate(vec![1.0, 2.0]).unwrap();
        assert_eq!(
            bootstrap(&s, &EstimandSpec::mean(), 199, 1),
            Err(Error::TooFewReplicates { needed: 200, got: 199 })
        );
    }

    #[test]
    fn percentile_bounds_inside_replicate_range() {
        let s = Sample::univariate((0..30).map(|i| f64::from(i).sqrt()).collect()).unwrap();
        let b = bootstrap(&s, &EstimandSpec::mean(), 400, 3).unwrap();
        let lo = b.estimates.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = b.estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo <= b.percentile_ci.lower && b.percentile_ci.upper <= hi);
        assert_eq!(b.failures, 0);
        assert_eq!(b.estimand, "mean");
    }

    #[test]
    fn instability_is_reported() {
        // Half the resamples of two points are constant, so the correlation fails.
        let s = Sample::pairs(vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0]).unwrap();
        match bootstrap(&s, &EstimandSpec::correlation(), 300, 5) {
            Err(Error::ResampleInstability { failures, replicates: 300 }) => assert!(failures > 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn same_seed_same_result() {
        let s = Sample::univariate((1..=40).map(f64::from).collect()).unwrap();
        let a = bootstrap(&s, &EstimandSpec::mean(), 300, 11).unwrap();
        let b = bootstrap(&s, &EstimandSpec::mean(), 300, 11).unwrap();
        let c = bootstrap(&s, &EstimandSpec::mean(), 300, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.se, c.se);
    }

    #[test]
    fn two_point_law_at_n_one() {
        let mut cfg = CltConfig::new(Distribution1d::Bernoulli { p: 0.5 }, vec![1]);
        cfg.replicates = 20_000;
        cfg.repeats = 1;
        let r = clt_experiment(&cfg).unwrap();
        let expected = normal_cdf(1.0) - 0.5;
        assert!((r.rows[0].ks - expected).abs() < 0.015, "{}", r.rows[0].ks);
    }

    #[test]
    fn ks_of_exact_lattice() {
        assert!((ks_distance_to_normal(&[0.0]) - 0.5).abs() < 1e-15);
        let ties = ks_distance_to_normal(&[-1.0, -1.0, 1.0, 1.0]);
        assert!((ties - (normal_cdf(1.0) - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn distribution_tags() {
        assert_eq!("poisson".parse::<Distribution1d>().unwrap(), Distribution1d::Poisson { lambda: 1.0 });
        assert_eq!("Poisson(2.5)".parse::<Distribution1d>().unwrap(), Distribution1d::Poisson { lambda: 2.5 });
        assert_eq!("uniform".parse::<Distribution1d>().unwrap(), Distribution1d::Uniform);
        assert!("poisson(0)".parse::<Distribution1d>().is_err());
        assert!("cauchy".parse::<Distribution1d>().is_err());
        assert!("bernoulli(1)".parse::<Distribution1d>().is_err());
    }

    #[test]
    fn degenerate_poisson_rejected() {
        let cfg = CltConfig::new(Distribution1d::Poisson { lambda: 0.0 }, vec![10]);
        assert_eq!(clt_experiment(&cfg).unwrap_err().category(), "unsupported-distribution");
    }

    #[test]
    fn uniform_means_are_nearly_normal() {
        let mut cfg = CltConfig::new(Distribution1d::Uniform, vec![1, 30]);
        cfg.repeats = 20;
        cfg.replicates = 1000;
        let r = clt_experiment(&cfg).unwrap();
        assert!(r.mean_ks(30).unwrap() < r.mean_ks(1).unwrap());
        assert!(r.rows.iter().all(|k| (0.0..=1.0).contains(&k.ks)));
    }
}
