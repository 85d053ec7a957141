use delta_inference::estimands::{correlation_inference, mean_inference};
use delta_inference::resample::{bootstrap, clt_experiment, CltConfig, Distribution1d};
use delta_inference::stats::{variance, VarianceConvention};
use delta_inference::{EstimandSpec, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn two_point_sample_matches_exhaustive_enumeration() {
    // Resamples of {0, 1}: (0,0), (0,1), (1,0), (1,1), equally likely.
    let exhaustive: Vec<f64> = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
        .iter()
        .map(|r| (r[0] + r[1]) / 2.0)
        .collect();
    let limit = variance(&exhaustive, VarianceConvention::Population).unwrap().sqrt();
    assert!((limit - 0.125f64.sqrt()).abs() < 1e-15);

    let s = Sample::univariate(vec![0.0, 1.0]).unwrap();
    let b = bootstrap(&s, &EstimandSpec::mean(), 40_000, 99).unwrap();
    assert!((b.se - limit).abs() / limit < 0.02, "{} vs {limit}", b.se);
    assert_eq!(b.percentile_ci.lower, 0.0);
    assert_eq!(b.percentile_ci.upper, 1.0);
}

#[test]
fn mean_se_converges_to_s_over_root_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let x: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
    let target = (variance(&x, VarianceConvention::Unbiased).unwrap() / 500.0).sqrt();
    let b = bootstrap(&Sample::univariate(x).unwrap(), &EstimandSpec::mean(), 5000, 22).unwrap();
    assert!((b.se - target).abs() / target < 0.05, "{} vs {target}", b.se);
}

#[test]
fn identical_across_thread_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let x: Vec<f64> = (0..200).map(|_| rng.random_range(0.0..3.0)).collect();
    let y: Vec<f64> = x.iter().map(|v| v + rng.random_range(0.0..1.0)).collect();
    let s = Sample::pairs(x, y).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bootstrap(&s, &EstimandSpec::correlation(), 500, 24).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
}

#[test]
fn correlation_bootstrap_overlaps_delta_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let x: Vec<f64> = (0..400).map(|_| rng.random_range(0.0..10.0)).collect();
    let y: Vec<f64> = x.iter().map(|v| v + rng.random_range(-3.0..3.0)).collect();
    let s = Sample::pairs(x, y).unwrap();
    let delta = correlation_inference(&s, &EstimandSpec::correlation()).unwrap();
    let boot = bootstrap(&s, &EstimandSpec::correlation(), 1000, 26).unwrap();
    let overlap = delta.ci.upper.min(boot.percentile_ci.upper) - delta.ci.lower.max(boot.percentile_ci.lower);
    assert!(overlap >= 0.9 * delta.ci.width(), "{:?} vs {:?}", delta.ci, boot.percentile_ci);
}

#[test]
fn constant_sample_has_zero_bootstrap_se() {
    let s = Sample::univariate(vec![-1.5; 30]).unwrap();
    let b = bootstrap(&s, &EstimandSpec::mean(), 200, 0).unwrap();
    assert_eq!(b.se, 0.0);
    let delta = mean_inference(&s, &EstimandSpec::mean()).unwrap();
    assert_eq!(delta.se, 0.0);
}

#[test]
fn clt_distance_shrinks_with_n() {
    let mut cfg = CltConfig::new(Distribution1d::Poisson { lambda: 1.0 }, vec![10, 1000]);
    cfg.repeats = 20;
    cfg.seed = 27;
    let r = clt_experiment(&cfg).unwrap();
    assert!(r.mean_ks(1000).unwrap() < r.mean_ks(10).unwrap());
    assert_eq!(r, clt_experiment(&cfg).unwrap());
}
