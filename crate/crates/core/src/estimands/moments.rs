//! Estimands that are smooth functions of sample means.

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::stats::{if_variance, mean, sample_moments, variance, wald_ci, InfluenceCurve, VarianceConvention};

use super::{
    closed_form, covariance_matrix, delta_method, functionals, scale_matrix, EstimandKind, EstimandSpec,
    InferenceResult,
};

/// The ratio of means is refused when `|Ȳ| ≤ DENOMINATOR_GUARD · sd(Y)/√n`.
pub const DENOMINATOR_GUARD: f64 = 5.0;

/// `|ρ̂|` within this of 1 is treated as a perfect correlation.
const CORRELATION_BOUNDARY: f64 = 1e-10;

/// Sample mean with influence values `xᵢ - x̄`.
pub fn mean_inference(sample: &Sample, spec: &EstimandSpec) -> Result<InferenceResult> {
    spec.validate()?;
    let x = sample.column(spec.column_or(0, 0))?;
    sample.require_n(2)?;
    let estimate = mean(x);
    let curve = InfluenceCurve::new(x.iter().map(|v| v - estimate).collect(), "mean", spec.convention);
    let se = if_variance(&curve)?.sqrt();
    let ci = wald_ci(estimate, se, spec.level)?;
    Ok(InferenceResult::new(EstimandKind::Mean, "influence-function", estimate, se, ci, x.len()).with_curve(curve))
}

/// Ratio of two means `X̄/Ȳ` from paired observations.
///
/// The standard error comes from the autodiff gradient contracted with the
/// sample covariance of `(X, Y)`; the closed-form expression is recorded as
/// the `closed_form_se` diagnostic.
pub fn ratio_of_means_inference(pairs: &Sample, spec: &EstimandSpec) -> Result<InferenceResult> {
    spec.validate()?;
    let x = pairs.column(spec.column_or(0, 0))?;
    let y = pairs.column(spec.column_or(1, 1))?;
    pairs.require_n(2)?;
    let n = x.len();
    let (mx, my) = (mean(x), mean(y));

    let sd_y = variance(y, VarianceConvention::Unbiased)?.sqrt();
    let threshold = spec.denominator_guard * sd_y / (n as f64).sqrt();
    if my.abs() <= threshold {
        return Err(Error::DenominatorNearZero { mean: my, threshold });
    }

    let cov = covariance_matrix(&[x, y], spec.convention)?;
    let delta = delta_method(functionals::ratio, &[mx, my], &scale_matrix(cov.clone(), 1.0 / n as f64))?;
    let g = delta.gradient.partials();
    let curve = InfluenceCurve::new(
        x.iter().zip(y).map(|(a, b)| g[0] * (a - mx) + g[1] * (b - my)).collect(),
        "ratio-of-means",
        spec.convention,
    );
    let closed = closed_form::ratio_variance(mx, my, cov[0][0], cov[1][1], cov[0][1], n).max(0.0);
    let ci = wald_ci(delta.estimate, delta.se, spec.level)?;
    Ok(InferenceResult::new(EstimandKind::RatioOfMeans, "delta-method", delta.estimate, delta.se, ci, n)
        .with_curve(curve)
        .note("closed_form_se", closed.sqrt())
        .note("mean_x", mx)
        .note("mean_y", my))
}

/// Pearson correlation as a functional of five raw moments.
///
/// Influence values are `h(Xᵢ,Yᵢ) = Σⱼ ∂φ/∂μⱼ · (mⱼ(Xᵢ,Yᵢ) - μ̂ⱼ)` with
/// `m = (XY, X, Y, X², Y²)`; the variance is that of `h` over `n`. The
/// interval is a plain Wald interval on `ρ̂`.
pub fn correlation_inference(pairs: &Sample, spec: &EstimandSpec) -> Result<InferenceResult> {
    spec.validate()?;
    let x = pairs.column(spec.column_or(0, 0))?;
    let y = pairs.column(spec.column_or(1, 1))?;
    pairs.require_n(3)?;
    let bound = Sample::pairs(x.to_vec(), y.to_vec())?;
    let m = sample_moments(&bound, VarianceConvention::Population)?;
    if m.var_x <= f64::EPSILON * m.mean_x2 || m.var_y <= f64::EPSILON * m.mean_y2 {
        return Err(Error::DegenerateVariance);
    }
    let raw = m.raw();
    let g = crate::autodiff::gradient(functionals::correlation, &raw)?;
    let rho = crate::autodiff::evaluate(functionals::correlation, &raw);
    if !rho.is_finite() || 1.0 - rho.abs() < CORRELATION_BOUNDARY {
        return Err(Error::DegenerateCorrelation(rho));
    }

    let gp = g.partials();
    let h: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let contributions = [a * b, a, b, a * a, b * b];
            contributions.iter().zip(&raw).zip(gp).map(|((c, mu), d)| d * (c - mu)).sum()
        })
        .collect();
    let curve = InfluenceCurve::new(h, "correlation", spec.convention);
    let se = if_variance(&curve)?.sqrt();
    let ci = wald_ci(rho, se, spec.level)?;

    let closed = closed_form::correlation_gradient(raw);
    let gradient_gap = closed.iter().zip(gp).fold(0.0f64, |acc, (c, a)| acc.max((c - a).abs()));
    Ok(InferenceResult::new(EstimandKind::Correlation, "influence-function", rho, se, ci, x.len())
        .with_curve(curve)
        .note("closed_form_gradient_gap", gradient_gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Scale;

    #[test]
    fn constant_sample_has_zero_se() {
        let s = Sample::univariate(vec![2.5; 3]).unwrap();
        let r = mean_inference(&s, &EstimandSpec::mean()).unwrap();
        assert_eq!(r.estimate, 2.5);
        assert_eq!(r.se, 0.0);
        assert_eq!((r.ci.lower, r.ci.upper), (2.5, 2.5));
    }

    #[test]
    fn mean_of_one_two_three() {
        let s = Sample::univariate(vec![1.0, 2.0, 3.0]).unwrap();
        let r = mean_inference(&s, &EstimandSpec::mean()).unwrap();
        assert_eq!(r.estimate, 2.0);
        assert_eq!(r.influence_curve.as_ref().unwrap().values(), &[-1.0, 0.0, 1.0]);
        assert!((r.se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(r.ci.scale, Scale::Natural);

        let p = mean_inference(&s, &EstimandSpec::mean().with_convention(VarianceConvention::Population)).unwrap();
        assert!((p.se - (2.0f64 / 9.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mean_needs_two_points() {
        let s = Sample::univariate(vec![1.0]).unwrap();
        assert!(matches!(mean_inference(&s, &EstimandSpec::mean()), Err(Error::InsufficientSample { .. })));
    }

    #[test]
    fn identical_columns_cancel() {
        let x = vec![11.0, 12.5, 13.0, 14.5, 12.0];
        let s = Sample::pairs(x.clone(), x).unwrap();
        let r = ratio_of_means_inference(&s, &EstimandSpec::ratio_of_means()).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert!(r.se < 1e-12, "{}", r.se);
    }

    #[test]
    fn two_pair_ratio_by_hand() {
        // X̄=2, Ȳ=3, unbiased Var X = Var Y = Cov = 2, n=2:
        // (1/2)[2/9 + 4·2/81 - 2·(2/27)·2] = (1/2)(18 + 8 - 24)/81 = 1/81
        // Ȳ is only 3 standard errors from zero here, inside the default guard.
        let s = Sample::pairs(vec![1.0, 3.0], vec![2.0, 4.0]).unwrap();
        assert!(ratio_of_means_inference(&s, &EstimandSpec::ratio_of_means()).is_err());
        let spec = EstimandSpec::ratio_of_means().with_denominator_guard(1.0);
        let r = ratio_of_means_inference(&s, &spec).unwrap();
        assert!((r.estimate - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.se - 1.0 / 9.0).abs() < 1e-15, "{}", r.se);
        assert!((r.diagnostics["closed_form_se"] - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn denominator_near_zero() {
        let s = Sample::pairs(vec![1.0, 2.0, 3.0, 4.0], vec![-1.0, 1.0, -1.0, 1.2]).unwrap();
        let err = ratio_of_means_inference(&s, &EstimandSpec::ratio_of_means()).unwrap_err();
        assert_eq!(err.category(), "denominator-near-zero");
        let zero = Sample::pairs(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap();
        assert!(ratio_of_means_inference(&zero, &EstimandSpec::ratio_of_means()).is_err());
    }

    #[test]
    fn perfect_correlation_is_degenerate() {
        let x = vec![1.0, 2.0, 4.0, 7.0];
        let s = Sample::pairs(x.clone(), x).unwrap();
        let err = correlation_inference(&s, &EstimandSpec::correlation()).unwrap_err();
        assert_eq!(err.category(), "degenerate-correlation");
    }

    #[test]
    fn constant_margin_is_degenerate() {
        let s = Sample::pairs(vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(correlation_inference(&s, &EstimandSpec::correlation()), Err(Error::DegenerateVariance));
    }

    #[test]
    fn perturbed_diagonal() {
        let s = Sample::pairs(vec![-1.0, 0.0, 1.0], vec![-1.0 - 1e-3, 0.0, 1.0 - 1e-3]).unwrap();
        let r = correlation_inference(&s, &EstimandSpec::correlation()).unwrap();
        assert!(r.estimate < 1.0);
        let h = r.influence_curve.unwrap();
        let scale = h.values().iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
        assert!(h.mean().abs() < 1e-10 * scale);
        assert!(r.diagnostics["closed_form_gradient_gap"] < 1e-8);
    }
}
