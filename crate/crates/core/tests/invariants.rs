use delta_inference::estimands::{
    correlation_inference, mean_inference, quantile_inference, ratio_of_means_inference, risk_ratio_inference,
};
use delta_inference::stats::{variance, VarianceConvention};
use delta_inference::{EstimandSpec, Sample};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[test]
fn mean_influence_curve_is_centered() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let normal = Normal::new(3.0, 2.0).unwrap();
    for _ in 0..1000 {
        let x: Vec<f64> = (0..50).map(|_| normal.sample(&mut rng)).collect();
        let s2 = variance(&x, VarianceConvention::Unbiased).unwrap();
        let r = mean_inference(&Sample::univariate(x).unwrap(), &EstimandSpec::mean()).unwrap();
        let curve = r.influence_curve.unwrap();
        let scale = curve.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(curve.mean().abs() <= 1e-12 * scale);
        assert!((r.se * r.se - s2 / 50.0).abs() <= 4.0 * f64::EPSILON * s2 / 50.0);
    }
}

fn pairs(seed: u64, n: usize) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..5.0)).collect();
    let y: Vec<f64> = x.iter().map(|v| 2.0 + 0.5 * v + rng.random_range(-1.0..1.0)).collect();
    Sample::pairs(x, y).unwrap()
}

#[test]
fn correlation_is_symmetric_in_its_arguments() {
    let s = pairs(11, 200);
    let swapped = s.select_columns(&[1, 0]).unwrap();
    let a = correlation_inference(&s, &EstimandSpec::correlation()).unwrap();
    let b = correlation_inference(&swapped, &EstimandSpec::correlation()).unwrap();
    assert!((a.estimate - b.estimate).abs() < 1e-14);
    assert!((a.se - b.se).abs() < 1e-14);
}

#[test]
fn results_ignore_row_order() {
    let s = pairs(12, 150);
    let mut order: Vec<usize> = (0..s.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0));
    let shuffled = s.select_rows(&order).unwrap();
    let specs = [EstimandSpec::mean(), EstimandSpec::ratio_of_means(), EstimandSpec::correlation()];
    for spec in specs {
        let a = spec.evaluate(&s).unwrap();
        let b = spec.evaluate(&shuffled).unwrap();
        assert!((a.estimate - b.estimate).abs() <= 1e-12 * a.estimate.abs().max(1.0), "{:?}", spec.kind);
        assert!((a.se - b.se).abs() <= 1e-10 * a.se, "{:?}", spec.kind);
    }
}

#[test]
fn ratio_of_reciprocal_columns() {
    // X̄/Ȳ and Ȳ/X̄ are reciprocal; delta-method SEs relate through the
    // derivative of 1/r: se(1/r) = se(r)/r².
    let s = pairs(13, 300);
    let a = ratio_of_means_inference(&s, &EstimandSpec::ratio_of_means()).unwrap();
    let b = ratio_of_means_inference(&s, &EstimandSpec::ratio_of_means().with_columns(vec![1, 0])).unwrap();
    assert!((a.estimate * b.estimate - 1.0).abs() < 1e-14);
    assert!((b.se - a.se / (a.estimate * a.estimate)).abs() < 1e-12);
}

#[test]
fn population_convention_shrinks_by_n_minus_one_over_n() {
    let s = pairs(14, 40);
    let u = mean_inference(&s, &EstimandSpec::mean()).unwrap();
    let p = mean_inference(&s, &EstimandSpec::mean().with_convention(VarianceConvention::Population)).unwrap();
    assert!((p.se * p.se - u.se * u.se * 39.0 / 40.0).abs() < 1e-15);
}

#[test]
fn quantile_with_known_uniform_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let x: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
    let s = Sample::univariate(x).unwrap();
    for p in [0.1, 0.25, 0.5, 0.9] {
        let spec = EstimandSpec::quantile(p).with_known_density(|v| if (0.0..=1.0).contains(&v) { 1.0 } else { 0.0 });
        let r = quantile_inference(&s, p, &spec).unwrap();
        assert!((r.se - (p * (1.0 - p) / 500.0).sqrt()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interval_widens_with_level(lo in 0.5f64..0.98, extra in 0.001f64..0.019) {
        let s = pairs(16, 60);
        let hi = lo + extra;
        for spec in [EstimandSpec::mean(), EstimandSpec::ratio_of_means(), EstimandSpec::correlation()] {
            let a = spec.clone().with_level(lo).evaluate(&s).unwrap();
            let b = spec.with_level(hi).evaluate(&s).unwrap();
            prop_assert!(b.ci.lower < a.ci.lower && a.ci.upper < b.ci.upper);
            prop_assert_eq!(a.se, b.se);
        }
        let a = risk_ratio_inference(0.3, 90, 0.2, 110, &EstimandSpec::risk_ratio().with_level(lo)).unwrap();
        let b = risk_ratio_inference(0.3, 90, 0.2, 110, &EstimandSpec::risk_ratio().with_level(hi)).unwrap();
        prop_assert!(b.ci.lower < a.ci.lower && a.ci.upper < b.ci.upper);
    }

    #[test]
    fn mean_shift_moves_interval_only(shift in -100.0f64..100.0) {
        let base: Vec<f64> = (0..25).map(|i| f64::from(i).sin()).collect();
        let a = mean_inference(&Sample::univariate(base.clone()).unwrap(), &EstimandSpec::mean()).unwrap();
        let moved: Vec<f64> = base.iter().map(|v| v + shift).collect();
        let b = mean_inference(&Sample::univariate(moved).unwrap(), &EstimandSpec::mean()).unwrap();
        prop_assert!((b.estimate - a.estimate - shift).abs() < 1e-12);
        prop_assert!((b.se - a.se).abs() < 1e-12);
    }
}
