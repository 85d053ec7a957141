//! Standard errors and Wald intervals for plug-in estimators, by the delta
//! method and influence functions.
//!
//! The estimand is written as a smooth function of quantities whose sampling
//! covariance is known (means, proportions, regression coefficients). Forward
//! mode automatic differentiation supplies the gradient at the plug-in
//! estimate, and `∇ᵀΣ∇` becomes the variance:
//!
//! ```
//! use delta_inference::estimands::{risk_ratio_inference, EstimandSpec};
//!
//! let rr = risk_ratio_inference(0.6, 100, 0.4, 100, &EstimandSpec::risk_ratio()).unwrap();
//! assert!((rr.estimate - 1.5).abs() < 1e-15);
//! println!("[{:.6}, {:.6}]", rr.ci.lower, rr.ci.upper); // [1.124081, 2.001634]
//! ```
//!
//! Sample-based estimands take a [`Sample`] and an
//! [`EstimandSpec`](estimands::EstimandSpec); [`resample::bootstrap`] reruns
//! the same spec on resampled rows as an independent check.

pub mod autodiff;
pub mod error;
pub mod estimands;
pub mod kde;
mod linalg;
pub mod logit;
pub mod normal;
pub mod resample;
pub mod sample;
pub mod stats;

pub use error::{Error, Result};
pub use estimands::{EstimandKind, EstimandSpec, InferenceResult};
pub use sample::Sample;
pub use stats::{ConfidenceInterval, InfluenceCurve, Scale, VarianceConvention};

// The guide's chapters, compiled here so `cargo test --doc` runs their examples.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/recipe.md")]
    mod recipe {}
    #[doc = include_str!("../../../book/src/dual-numbers.md")]
    mod dual_numbers {}
    #[doc = include_str!("../../../book/src/influence-functions.md")]
    mod influence_functions {}
    #[doc = include_str!("../../../book/src/estimands.md")]
    mod estimands {}
    #[doc = include_str!("../../../book/src/means-and-ratios.md")]
    mod means_and_ratios {}
    #[doc = include_str!("../../../book/src/risk-ratios.md")]
    mod risk_ratios {}
    #[doc = include_str!("../../../book/src/quantiles.md")]
    mod quantiles {}
    #[doc = include_str!("../../../book/src/correlation.md")]
    mod correlation {}
    #[doc = include_str!("../../../book/src/logistic-regression.md")]
    mod logistic_regression {}
    #[doc = include_str!("../../../book/src/when-it-fails.md")]
    mod when_it_fails {}
    #[doc = include_str!("../../../book/src/resampling.md")]
    mod resampling {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
