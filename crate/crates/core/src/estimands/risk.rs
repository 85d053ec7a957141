use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::autodiff::{evaluate, gradient};
use crate::error::{Error, Result};
use crate::stats::{mean, variance, wald_ci_log, VarianceConvention};

use super::{closed_form, delta_method, functionals, EstimandKind, EstimandSpec, InferenceResult};

/// Normal approximation to a binomial proportion is flagged when
/// `n·p·(1-p)` falls below this.
pub const POSITIVITY_RULE: f64 = 9.0;

fn check_proportion(p: f64) -> Result<()> {
    if p == 0.0 || p == 1.0 {
        Err(Error::BoundaryProportion(p))
    } else if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Risk ratio `p₁/p₂` of two independent proportions.
///
/// The interval is built on the log scale, where
/// `Var[ln RR] ≈ (1-p₁)/(p₁n₁) + (1-p₂)/(p₂n₂)`, and exponentiated; the
/// returned `se` is that of `ln RR`.
///
/// ```
/// use delta_inference::estimands::{risk_ratio_inference, EstimandSpec};
///
/// let r = risk_ratio_inference(0.6, 100, 0.4, 100, &EstimandSpec::risk_ratio()).unwrap();
/// assert!((r.estimate - 1.5).abs() < 1e-15);
/// assert!((r.se - 0.147196).abs() < 1e-6);
/// assert!((r.ci.lower - 1.124081).abs() < 1e-6);
/// assert!((r.ci.upper - 2.001634).abs() < 1e-6);
/// ```
pub fn risk_ratio_inference(p1: f64, n1: usize, p2: f64, n2: usize, spec: &EstimandSpec) -> Result<InferenceResult> {
    spec.validate()?;
    check_proportion(p1)?;
    check_proportion(p2)?;
    for n in [n1, n2] {
        if n == 0 {
            return Err(Error::InsufficientSample { needed: 1, got: 0 });
        }
    }
    let sigma = vec![
        vec![p1 * (1.0 - p1) / n1 as f64, 0.0],
        vec![0.0, p2 * (1.0 - p2) / n2 as f64],
    ];
    let delta = delta_method(functionals::log_risk_ratio, &[p1, p2], &sigma)?;
    let estimate = p1 / p2;
    let ci = wald_ci_log(estimate, delta.se, spec.level)?;

    let mut result = InferenceResult::new(EstimandKind::RiskRatio, "delta-method", estimate, delta.se, ci, n1 + n2)
        .note("n1", n1 as f64)
        .note("n2", n2 as f64)
        .note("closed_form_se", closed_form::log_risk_ratio_variance(p1, n1, p2, n2).sqrt());
    for (arm, p, n) in [(1, p1, n1), (2, p2, n2)] {
        let mass = n as f64 * p * (1.0 - p);
        if mass < POSITIVITY_RULE {
            result.warnings.push(format!(
                "arm {arm}: n·p·(1-p) = {mass:.3} < {POSITIVITY_RULE}; normal approximation may be poor"
            ));
        }
    }
    Ok(result)
}

/// Attributable fraction among the exposed at exposure `x`.
pub fn attributable_fraction(theta: f64, exposure: f64) -> f64 {
    evaluate(functionals::attributable_fraction(exposure), &[theta])
}

/// Floor on the delta-method SE when forming the divergence ratio.
pub const AF_FLOOR: f64 = 1e-12;
/// Divergence ratios above this raise the warning.
pub const AF_DIVERGENCE_THRESHOLD: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfOptions {
    pub draws: usize,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for AfOptions {
    fn default() -> Self {
        Self { draws: 100_000, seed: 0, threshold: AF_DIVERGENCE_THRESHOLD }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AfReport {
    pub estimate: f64,
    pub derivative: f64,
    pub delta_se: f64,
    pub monte_carlo_se: f64,
    pub divergence_ratio: f64,
    pub warning: bool,
    pub draws: usize,
    pub seed: u64,
}

/// Compares the delta-method SE of the attributable fraction with a
/// Monte-Carlo SE obtained by pushing `θ* ~ Normal(θ̂, se²)` through the
/// fraction. Near `θ = 0` the derivative vanishes while the fraction still
/// moves, so the linearization understates the spread badly.
pub fn attributable_fraction_diagnostic(
    theta_hat: f64,
    se_theta: f64,
    exposure: f64,
    options: &AfOptions,
) -> Result<AfReport> {
    if !(exposure > 0.0) {
        return Err(Error::NonPositiveExposure(exposure));
    }
    if !(se_theta > 0.0 && se_theta.is_finite()) {
        return Err(Error::InvalidStandardError(se_theta));
    }
    if !theta_hat.is_finite() {
        return Err(Error::InvalidOption(format!("theta {theta_hat} must be finite")));
    }
    if options.draws < 2 {
        return Err(Error::TooFewReplicates { needed: 2, got: options.draws });
    }
    let af = functionals::attributable_fraction(exposure);
    let derivative = gradient(&af, &[theta_hat])?.partials()[0];
    let delta_se = derivative.abs() * se_theta;

    let normal = Normal::new(theta_hat, se_theta).map_err(|e| Error::InvalidOption(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let values: Vec<f64> = (0..options.draws)
        .map(|_| attributable_fraction(normal.sample(&mut rng), exposure))
        .collect();
    let monte_carlo_se = variance(&values, VarianceConvention::Unbiased)?.sqrt();
    let divergence_ratio = monte_carlo_se / delta_se.max(AF_FLOOR);
    debug_assert!(mean(&values) <= 1.0);

    Ok(AfReport {
        estimate: attributable_fraction(theta_hat, exposure),
        derivative,
        delta_se,
        monte_carlo_se,
        divergence_ratio,
        warning: divergence_ratio > options.threshold,
        draws: options.draws,
        seed: options.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Scale;

    #[test]
    fn equal_arms() {
        let r = risk_ratio_inference(0.3, 80, 0.3, 80, &EstimandSpec::risk_ratio()).unwrap();
        assert_eq!(r.estimate, 1.0);
        let (lo, hi) = (r.ci.lower.ln(), r.ci.upper.ln());
        assert!((lo + hi).abs() < 1e-15);
        assert_eq!(r.ci.scale, Scale::Log);
    }

    #[test]
    fn half_and_half() {
        let r = risk_ratio_inference(0.5, 50, 0.5, 50, &EstimandSpec::risk_ratio()).unwrap();
        assert!((r.se * r.se - 0.04).abs() < 1e-15);
        assert!((r.se - 0.2).abs() < 1e-15);
    }

    #[test]
    fn boundary_proportions() {
        let spec = EstimandSpec::risk_ratio();
        assert_eq!(risk_ratio_inference(0.0, 10, 0.5, 10, &spec), Err(Error::BoundaryProportion(0.0)));
        assert_eq!(risk_ratio_inference(0.5, 10, 1.0, 10, &spec), Err(Error::BoundaryProportion(1.0)));
        assert_eq!(risk_ratio_inference(1.2, 10, 0.5, 10, &spec), Err(Error::InvalidProbability(1.2)));
        assert!(risk_ratio_inference(0.5, 0, 0.5, 10, &spec).is_err());
    }

    #[test]
    fn small_arms_warn() {
        let r = risk_ratio_inference(0.1, 20, 0.5, 100, &EstimandSpec::risk_ratio()).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].starts_with("arm 1"));
        let ok = risk_ratio_inference(0.6, 100, 0.4, 100, &EstimandSpec::risk_ratio()).unwrap();
        assert!(ok.warnings.is_empty());
    }

    #[test]
    fn swapping_arms_reflects() {
        let spec = EstimandSpec::risk_ratio();
        let a = risk_ratio_inference(0.6, 100, 0.4, 120, &spec).unwrap();
        let b = risk_ratio_inference(0.4, 120, 0.6, 100, &spec).unwrap();
        assert!((a.estimate * b.estimate - 1.0).abs() < 1e-15);
        assert!((a.se - b.se).abs() < 1e-15);
        assert!((a.ci.lower.ln() + b.ci.upper.ln()).abs() < 1e-14);
        assert!((a.ci.upper.ln() + b.ci.lower.ln()).abs() < 1e-14);
    }

    #[test]
    fn fraction_is_one_at_and_below_zero() {
        assert_eq!(attributable_fraction(0.0, 1.0), 1.0);
        assert_eq!(attributable_fraction(-2.0, 1.0), 1.0);
        assert!((attributable_fraction(1.0, 1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn derivative_vanishes_at_origin() {
        let r = attributable_fraction_diagnostic(0.0, 0.05, 1.0, &AfOptions::default()).unwrap();
        assert_eq!(r.delta_se, 0.0);
        assert!(r.monte_carlo_se > 0.0);
        assert!(r.warning);
    }

    #[test]
    fn smooth_regime_agrees() {
        let r = attributable_fraction_diagnostic(5.0, 0.1, 1.0, &AfOptions::default()).unwrap();
        assert!((r.monte_carlo_se / r.delta_se - 1.0).abs() < 0.1, "{r:?}");
        assert!(!r.warning);
        let expected = closed_form::attributable_fraction_derivative(5.0, 1.0);
        assert!((r.derivative - expected).abs() < 1e-15);
    }

    #[test]
    fn vanishing_uncertainty() {
        let r = attributable_fraction_diagnostic(5.0, 1e-9, 1.0, &AfOptions::default()).unwrap();
        assert!(r.delta_se < 1e-10);
        assert!(r.monte_carlo_se < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        let o = AfOptions::default();
        assert_eq!(attributable_fraction_diagnostic(1.0, 0.1, 0.0, &o), Err(Error::NonPositiveExposure(0.0)));
        assert_eq!(attributable_fraction_diagnostic(1.0, 0.0, 1.0, &o), Err(Error::InvalidStandardError(0.0)));
    }

    #[test]
    fn seeded_monte_carlo_is_reproducible() {
        let o = AfOptions { draws: 5000, seed: 42, ..AfOptions::default() };
        let a = attributable_fraction_diagnostic(0.3, 0.1, 2.0, &o).unwrap();
        let b = attributable_fraction_diagnostic(0.3, 0.1, 2.0, &o).unwrap();
        assert_eq!(a, b);
    }
}
