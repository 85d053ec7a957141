use crate::error::{Error, Result};
use crate::logit::{design_from_sample, fit_logistic, FittedLogit};
use crate::sample::Sample;
use crate::stats::wald_ci;

use super::{closed_form, delta_method, functionals, EstimandKind, EstimandSpec, InferenceResult};

/// Conditional risk ratio `expit(a·β̂) / expit(b·β̂)` from a fitted logistic
/// model, with `se = √(∇φᵀ Σ_W ∇φ)` and a Wald interval on the ratio scale.
pub fn regression_rr_inference(
    fit: &FittedLogit,
    profile_a: &[f64],
    profile_b: &[f64],
    spec: &EstimandSpec,
) -> Result<InferenceResult> {
    crate::stats::check_level(spec.level)?;
    let k = fit.dimension();
    for profile in [profile_a, profile_b] {
        if profile.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: profile.len() });
        }
    }
    let delta = delta_method(functionals::relative_risk(profile_a, profile_b), &fit.coefficients, &fit.covariance)?;
    let closed = closed_form::relative_risk_gradient(&fit.coefficients, profile_a, profile_b);
    let gap = closed
        .iter()
        .zip(delta.gradient.partials())
        .fold(0.0f64, |m, (c, a)| m.max((c - a).abs()));
    let ci = wald_ci(delta.estimate, delta.se, spec.level)?;
    let mut result = InferenceResult::new(EstimandKind::RegressionRr, "delta-method", delta.estimate, delta.se, ci, fit.n)
        .note("closed_form_gradient_gap", gap)
        .note("iterations", fit.iterations as f64);
    if !fit.converged {
        result.warnings.push(format!("logistic fit did not converge in {} iterations", fit.iterations));
    }
    Ok(result)
}

/// Fits the logistic model on `spec.columns = [response, covariates…]`
/// (default: last column is the response) and evaluates the profiles.
pub fn regression_rr_from_sample(sample: &Sample, spec: &EstimandSpec) -> Result<InferenceResult> {
    spec.validate()?;
    let (a, b) = spec.profiles.as_ref().expect("validated");
    let (response, covariates) = match spec.columns.split_first() {
        Some((r, c)) => (*r, c.to_vec()),
        None => {
            let last = sample.width() - 1;
            (last, (0..last).collect())
        }
    };
    let (design, y) = design_from_sample(sample, response, &covariates)?;
    let fit = fit_logistic(&design, &y)?;
    regression_rr_inference(&fit, a, b, spec)
}
