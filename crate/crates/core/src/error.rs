use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Each variant maps to a stable, machine-readable [`Error::category`] so a
/// front end can turn it into a distinct exit status.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation point is empty")]
    EmptyPoint,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("functional left its domain: {0}")]
    Domain(String),

    #[error("insufficient sample: need at least {needed} observations, got {got}")]
    InsufficientSample { needed: usize, got: usize },
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("ragged rows: row {row} has width {found}, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("column {column} out of range for sample of width {width}")]
    ColumnOutOfRange { column: usize, width: usize },
    #[error("probability {0} must lie strictly between 0 and 1")]
    InvalidProbability(f64),
    #[error("confidence level {0} must lie strictly between 0 and 1")]
    InvalidLevel(f64),
    #[error("standard error {0} must be finite and non-negative")]
    InvalidStandardError(f64),
    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("denominator mean {mean} is within {threshold} of zero")]
    DenominatorNearZero { mean: f64, threshold: f64 },
    #[error("proportion {0} on the boundary; log risk-ratio variance undefined")]
    BoundaryProportion(f64),
    #[error("density estimate {density} at {at} is below the floor")]
    DegenerateDensity { at: f64, density: f64 },
    #[error("marginal variance is zero")]
    DegenerateVariance,
    #[error("correlation estimate {0} is on the boundary")]
    DegenerateCorrelation(f64),
    #[error("exposure level {0} must be positive")]
    NonPositiveExposure(f64),

    #[error("sample has zero spread")]
    DegenerateSample,
    #[error("bandwidth {0} must be positive and finite")]
    InvalidBandwidth(f64),

    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("complete or quasi-complete separation: max |coefficient| = {max_coefficient}")]
    Separation { max_coefficient: f64 },
    #[error("response at row {row} is {value}, expected 0 or 1")]
    InvalidResponse { row: usize, value: f64 },

    #[error("estimand failed on {failures} of {replicates} resamples")]
    ResampleInstability { failures: usize, replicates: usize },
    #[error("need at least {needed} replicates, got {got}")]
    TooFewReplicates { needed: usize, got: usize },
    #[error("unsupported distribution: {0}")]
    UnsupportedDistribution(String),
    #[error("estimand {0} cannot be computed from a sample")]
    NotSampleBased(&'static str),
}

impl Error {
    /// Short kebab-case tag identifying the error kind.
    pub fn category(&self) -> &'static str {
        match self {
            Error::EmptyPoint => "empty-point",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::Domain(_) => "domain",
            Error::InsufficientSample { .. } => "insufficient-sample",
            Error::NonFinite { .. } => "non-finite",
            Error::RaggedRows { .. } => "ragged-rows",
            Error::ColumnOutOfRange { .. } => "column-out-of-range",
            Error::InvalidProbability(_) => "invalid-probability",
            Error::InvalidLevel(_) => "invalid-level",
            Error::InvalidStandardError(_) => "invalid-standard-error",
            Error::InvalidOption(_) => "invalid-option",
            Error::DenominatorNearZero { .. } => "denominator-near-zero",
            Error::BoundaryProportion(_) => "boundary-proportion",
            Error::DegenerateDensity { .. } => "degenerate-density",
            Error::DegenerateVariance => "degenerate-variance",
            Error::DegenerateCorrelation(_) => "degenerate-correlation",
            Error::NonPositiveExposure(_) => "non-positive-exposure",
            Error::DegenerateSample => "degenerate-sample",
            Error::InvalidBandwidth(_) => "invalid-bandwidth",
            Error::RankDeficient => "rank-deficient",
            Error::Separation { .. } => "separation",
            Error::InvalidResponse { .. } => "invalid-response",
            Error::ResampleInstability { .. } => "resample-instability",
            Error::TooFewReplicates { .. } => "too-few-replicates",
            Error::UnsupportedDistribution(_) => "unsupported-distribution",
            Error::NotSampleBased(_) => "not-sample-based",
        }
    }
}
