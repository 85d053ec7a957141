use crate::error::{Error, Result};
use crate::kde::DensityEstimate;
use crate::sample::Sample;
use crate::stats::{sorted_copy, wald_ci, InfluenceCurve};

use super::{DensitySource, EstimandKind, EstimandSpec, InferenceResult};

/// Density values below this at the quantile are refused.
pub const DENSITY_FLOOR: f64 = 1e-8;
/// Smallest sample for which the quantile estimand is attempted.
pub const MIN_QUANTILE_N: usize = 20;

/// `min{xᵢ : F_n(xᵢ) ≥ p}`.
pub fn sample_quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientSample { needed: 1, got: 0 });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let sorted = sorted_copy(values);
    let n = sorted.len();
    // Smallest k with k/n ≥ p, computed in the same arithmetic the eCDF uses.
    let mut k = ((n as f64) * p).ceil().clamp(1.0, n as f64) as usize;
    while k > 1 && (k - 1) as f64 / n as f64 >= p {
        k -= 1;
    }
    while (k as f64) / (n as f64) < p {
        k += 1;
    }
    Ok(sorted[k - 1])
}

/// The `p`-quantile with standard error `√(p(1-p)/n) / f(q)`.
///
/// `f(q)` comes from `spec.density`: a kernel density estimate by default,
/// or a supplied density.
pub fn quantile_inference(sample: &Sample, p: f64, spec: &EstimandSpec) -> Result<InferenceResult> {
    spec.validate()?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let x = sample.column(spec.column_or(0, 0))?;
    sample.require_n(MIN_QUANTILE_N)?;
    let n = x.len();
    let q = sample_quantile(x, p)?;

    let (density, bandwidth) = match &spec.density {
        DensitySource::Kde { bandwidth } => {
            let kde = DensityEstimate::from_values(x, *bandwidth)?;
            (kde.evaluate(q), Some(kde.bandwidth()))
        }
        DensitySource::Known(f) => (f(q), None),
    };
    if !(density >= DENSITY_FLOOR) || !density.is_finite() {
        return Err(Error::DegenerateDensity { at: q, density });
    }

    let se = (p * (1.0 - p) / n as f64).sqrt() / density;
    let curve = InfluenceCurve::new(
        x.iter().map(|&v| ((v <= q) as u8 as f64 - p) / density).collect(),
        "quantile",
        spec.convention,
    );
    let ci = wald_ci(q, se, spec.level)?;
    let mut result = InferenceResult::new(EstimandKind::Quantile, "influence-function", q, se, ci, n)
        .with_curve(curve)
        .note("probability", p)
        .note("density_at_estimate", density);
    if let Some(h) = bandwidth {
        result = result.note("bandwidth", h);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
    }

    #[test]
    fn known_density_formula() {
        let s = Sample::univariate(uniform_grid(100)).unwrap();
        let spec = EstimandSpec::quantile(0.25).with_known_density(|_| 1.0);
        let r = quantile_inference(&s, 0.25, &spec).unwrap();
        assert!((r.se - 0.043301).abs() < 1e-6);
        assert_eq!(r.se, (0.25f64 * 0.75 / 100.0).sqrt());
        assert_eq!(r.estimate, 0.245);
    }

    #[test]
    fn median_of_symmetric_sample() {
        let values: Vec<f64> = (-10..=10).map(f64::from).collect();
        let s = Sample::univariate(values).unwrap();
        let r = quantile_inference(&s, 0.5, &EstimandSpec::quantile(0.5)).unwrap();
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn min_definition_with_exact_hits() {
        let v: Vec<f64> = (1..=20).map(f64::from).collect();
        // F_n(5) = 0.25 exactly, so the 0.25-quantile is 5, not 6.
        assert_eq!(sample_quantile(&v, 0.25).unwrap(), 5.0);
        assert_eq!(sample_quantile(&v, 0.2501).unwrap(), 6.0);
        assert_eq!(sample_quantile(&v, 0.05).unwrap(), 1.0);
        assert_eq!(sample_quantile(&v, 0.999).unwrap(), 20.0);
        // 0.1·30 is 3.0000000000000004 in floating point; F_n(3rd) = 0.1 still qualifies.
        let w: Vec<f64> = (1..=30).map(f64::from).collect();
        assert_eq!(sample_quantile(&w, 0.1).unwrap(), 3.0);
    }

    #[test]
    fn quantile_matches_ecdf_definition() {
        let v = vec![3.0, 1.0, 2.0, 2.0, 5.0, 4.0, 4.0];
        let e = crate::stats::Ecdf::new(&v).unwrap();
        for k in 1..100 {
            let p = f64::from(k) / 100.0;
            let brute = v
                .iter()
                .copied()
                .filter(|&x| e.eval(x) >= p)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(sample_quantile(&v, p).unwrap(), brute, "p={p}");
        }
    }

    #[test]
    fn too_small_sample() {
        let s = Sample::univariate(uniform_grid(10)).unwrap();
        assert!(matches!(
            quantile_inference(&s, 0.5, &EstimandSpec::quantile(0.5)),
            Err(Error::InsufficientSample { needed: 20, got: 10 })
        ));
    }

    #[test]
    fn zero_density_is_degenerate() {
        let s = Sample::univariate(uniform_grid(50)).unwrap();
        let spec = EstimandSpec::quantile(0.5).with_known_density(|_| 0.0);
        assert_eq!(
            quantile_inference(&s, 0.5, &spec).unwrap_err().category(),
            "degenerate-density"
        );
    }

    #[test]
    fn invalid_probability() {
        let s = Sample::univariate(uniform_grid(50)).unwrap();
        assert_eq!(
            quantile_inference(&s, 1.5, &EstimandSpec::quantile(0.5)),
            Err(Error::InvalidProbability(1.5))
        );
    }
}
