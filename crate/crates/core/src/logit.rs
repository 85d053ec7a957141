//! Logistic regression by iteratively reweighted least squares, with the
//! model-based (inverse Fisher information) coefficient covariance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::sample::Sample;

pub const MAX_ITERATIONS: usize = 50;
pub const CONVERGENCE_TOLERANCE: f64 = 1e-10;
/// Any coefficient larger than this in magnitude is taken as a sign of
/// separation.
pub const SEPARATION_THRESHOLD: f64 = 30.0;
const MAX_HALVINGS: usize = 30;

pub fn expit(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + eˣ)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedLogit {
    /// Intercept first.
    pub coefficients: Vec<f64>,
    /// `(XᵀWX)⁻¹` at the estimate.
    pub covariance: Vec<Vec<f64>>,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
    pub deviance: f64,
}

impl FittedLogit {
    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    pub fn standard_errors(&self) -> Vec<f64> {
        (0..self.dimension()).map(|i| self.covariance[i][i].sqrt()).collect()
    }
}

fn linear_predictor(row: &[f64], beta: &[f64]) -> f64 {
    row.iter().zip(beta).map(|(x, b)| x * b).sum()
}

/// `-2 · log-likelihood` of a Bernoulli model.
pub fn deviance(design: &[Vec<f64>], y: &[f64], beta: &[f64]) -> f64 {
    2.0 * design
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let eta = linear_predictor(row, beta);
            if yi == 1.0 { softplus(-eta) } else { softplus(eta) }
        })
        .sum::<f64>()
}

/// Score `Xᵀ(y - p)` and information `XᵀWX` at `beta`.
fn score_and_information(design: &[Vec<f64>], y: &[f64], beta: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = beta.len();
    let mut score = vec![0.0; k];
    let mut info = vec![vec![0.0; k]; k];
    for (row, &yi) in design.iter().zip(y) {
        let p = expit(linear_predictor(row, beta));
        let w = p * (1.0 - p);
        let r = yi - p;
        for a in 0..k {
            score[a] += row[a] * r;
            let wa = w * row[a];
            for b in 0..=a {
                info[a][b] += wa * row[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            info[b][a] = info[a][b];
        }
    }
    (score, info)
}

/// The observed information `XᵀWX` at an arbitrary coefficient vector.
pub fn information(design: &[Vec<f64>], y: &[f64], beta: &[f64]) -> Vec<Vec<f64>> {
    score_and_information(design, y, beta).1
}

fn validate(design: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    let n = design.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.len() });
    }
    let k = design.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::EmptyPoint);
    }
    if n <= k {
        return Err(Error::InsufficientSample { needed: k + 1, got: n });
    }
    for (i, row) in design.iter().enumerate() {
        if row.len() != k {
            return Err(Error::RaggedRows { row: i, expected: k, found: row.len() });
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, column: j });
        }
    }
    if let Some((row, &value)) = y.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidResponse { row, value });
    }
    Ok(k)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Fits `P(Y=1|x) = expit(xᵀβ)` by IRLS with step halving.
///
/// `design` holds one row per observation and must already contain the
/// intercept column. Stops when `max|Δβ| < 1e-10` or after 50 iterations;
/// `converged` records which.
pub fn fit_logistic(design: &[Vec<f64>], y: &[f64]) -> Result<FittedLogit> {
    let k = validate(design, y)?;
    let mut beta = vec![0.0; k];
    let mut dev = deviance(design, y, &beta);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (score, info) = score_and_information(design, y, &beta);
        let step = match Cholesky::new(&info) {
            Ok(chol) => chol.solve(&score),
            // Weights collapse once fitted probabilities are pinned at 0/1.
            Err(_) if iterations > 1 && max_abs(&beta) > 0.5 * SEPARATION_THRESHOLD => {
                return Err(Error::Separation { max_coefficient: max_abs(&beta) });
            }
            Err(e) => return Err(e),
        };

        let mut scale = 1.0;
        let mut candidate: Vec<f64>;
        let mut candidate_dev;
        let mut halvings = 0;
        loop {
            candidate = beta.iter().zip(&step).map(|(b, s)| b + scale * s).collect();
            candidate_dev = deviance(design, y, &candidate);
            if candidate_dev <= dev * (1.0 + 1e-12) || halvings == MAX_HALVINGS {
                break;
            }
            scale *= 0.5;
            halvings += 1;
        }

        let change = beta.iter().zip(&candidate).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
        beta = candidate;
        dev = candidate_dev;
        if max_abs(&beta) > SEPARATION_THRESHOLD {
            return Err(Error::Separation { max_coefficient: max_abs(&beta) });
        }
        if change < CONVERGENCE_TOLERANCE {
            converged = true;
            break;
        }
    }

    let info = information(design, y, &beta);
    let covariance = Cholesky::new(&info)?.inverse();
    Ok(FittedLogit { coefficients: beta, covariance, n: design.len(), converged, iterations, deviance: dev })
}

/// `expit(profile · β̂)`.
pub fn predict_prob(fit: &FittedLogit, profile: &[f64]) -> Result<f64> {
    if profile.len() != fit.dimension() {
        return Err(Error::DimensionMismatch { expected: fit.dimension(), found: profile.len() });
    }
    Ok(expit(linear_predictor(profile, &fit.coefficients)))
}

/// Builds an intercept-first design and a response vector from sample
/// columns.
pub fn design_from_sample(sample: &Sample, response: usize, covariates: &[usize]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let y = sample.column(response)?.to_vec();
    let cols: Vec<&[f64]> = covariates.iter().map(|&j| sample.column(j)).collect::<Result<_>>()?;
    let design = (0..sample.n())
        .map(|i| std::iter::once(1.0).chain(cols.iter().map(|c| c[i])).collect())
        .collect();
    Ok((design, y))
}

/// A simulated cancer-treatment cohort with both potential outcomes.
///
/// `age` (1 = over 65) ~ Bernoulli(0.6); `treat` (1 = dual therapy) ~
/// Bernoulli(expit(0.35 - 0.15·age)); the potential outcome under treatment
/// `a` is Bernoulli(expit(2 - a + 0.65·age)); `death` is the one observed
/// under the assigned treatment.
#[derive(Debug, Clone, PartialEq)]
pub struct MortalityCohort {
    pub age: Vec<f64>,
    pub treat: Vec<f64>,
    pub death_if_treated: Vec<f64>,
    pub death_if_untreated: Vec<f64>,
    pub death: Vec<f64>,
}

impl MortalityCohort {
    pub fn simulate(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InsufficientSample { needed: 1, got: 0 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bernoulli = |p: f64| if rng.random_bool(p) { 1.0 } else { 0.0 };
        let age: Vec<f64> = (0..n).map(|_| bernoulli(0.6)).collect();
        let treat: Vec<f64> = age.iter().map(|a| bernoulli(expit(0.35 - 0.15 * a))).collect();
        let death_if_treated: Vec<f64> = age.iter().map(|a| bernoulli(expit(2.0 - 1.0 + 0.65 * a))).collect();
        let death_if_untreated: Vec<f64> = age.iter().map(|a| bernoulli(expit(2.0 + 0.65 * a))).collect();
        let death = (0..n)
            .map(|i| death_if_treated[i] * treat[i] + death_if_untreated[i] * (1.0 - treat[i]))
            .collect();
        Ok(Self { age, treat, death_if_treated, death_if_untreated, death })
    }

    pub fn len(&self) -> usize {
        self.age.len()
    }

    pub fn is_empty(&self) -> bool {
        self.age.is_empty()
    }

    /// Mean of `death_if_treated - death_if_untreated`.
    pub fn risk_difference(&self) -> f64 {
        let total: f64 = self.death_if_treated.iter().zip(&self.death_if_untreated).map(|(a, b)| a - b).sum();
        total / self.len() as f64
    }

    /// Observed columns `age, treat, death`.
    pub fn to_sample(&self) -> Sample {
        Sample::named(
            vec!["age".into(), "treat".into(), "death".into()],
            vec![self.age.clone(), self.treat.clone(), self.death.clone()],
        )
        .expect("simulated columns are finite and equal length")
    }
}

/// Observed `(age, treat, death)` columns of a simulated cohort.
pub fn generate_mortality_data(n: usize, seed: u64) -> Result<Sample> {
    MortalityCohort::simulate(n, seed).map(|c| c.to_sample())
}
