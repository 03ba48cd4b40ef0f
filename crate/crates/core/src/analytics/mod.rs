//! Exact and semi-analytic predictions: composite-channel coefficients,
//! repetition closed forms, failure-count enumeration, the depolarizing
//! mapping, series-cancellation verification, and slope/threshold fits.

use thiserror::Error;

pub mod cancellation;
pub mod channel;
pub mod counts;
pub mod fits;
pub mod repetition;
pub mod series;
pub mod surface;

pub use cancellation::{verify_cancellation, MAX_EXACT_QUBITS};
pub use channel::{
    composite_coefficient, composite_coefficient_series, logical_rate_from_channel,
    negativity_condition, normalization_series,
};
pub use counts::{
    count_failures, depolarizing_f0, depolarizing_failure_counts, CountEntry, CountMode,
    CountProvenance, FailureCounts, DEFAULT_ENUMERATION_BUDGET,
};
pub use fits::{
    estimate_threshold, fit_slope, threshold_crossover_scale, SlopeFit, ThresholdFit,
};
pub use repetition::{
    repetition_identity_rate, repetition_identity_series, repetition_pec_rate,
    repetition_superbranch_rate, repetition_superbranch_series,
};
pub use series::SeriesPoly;
pub use surface::{surface_identity_series, surface_superbranch_fit, SuperbranchFit};

/// Weight-2 X-pattern failure count of the d=3 rotated surface code under
/// this crate's layout and decoder tie-break (mwpm-dp-1). Reference value
/// frozen from exhaustive enumeration over all 36 patterns.
pub const SURFACE_D3_BITFLIP_D2: u64 = 18;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("invalid indices: n={n}, omega={omega}, k={k}")]
    InvalidIndices { n: usize, omega: usize, k: usize },
    #[error("code distance must be odd and >= 3, got {0}")]
    InvalidDistance(usize),
    #[error("p = {p} is at or beyond the pole {pole}")]
    PoleViolation { p: f64, pole: f64 },
    #[error("failure counts are missing weight k = {k}")]
    MissingCounts { k: usize },
    #[error("exact enumeration needs {needed} patterns, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("instance with {n} qubits exceeds the exact-enumeration limit {limit}")]
    InstanceTooLarge { n: usize, limit: usize },
    #[error("fit underdetermined: {points} usable points, {needed} needed")]
    UnderdeterminedFit { points: usize, needed: usize },
    #[error("threshold degenerate: fitted slopes {slope_lo} and {slope_hi} are parallel")]
    DegenerateThreshold { slope_lo: f64, slope_hi: f64 },
    #[error(transparent)]
    Series(#[from] series::SeriesError),
    #[error(transparent)]
    Code(#[from] crate::code::CodeError),
    #[error(transparent)]
    Estimator(#[from] crate::estimator::EstimatorError),
}
