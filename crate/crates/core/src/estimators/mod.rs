//! Protocol estimators and their closed-form error variances.
//!
//! Each estimator is paired with a predictor. Predictors return the formula
//! value together with the SNR of the underlying correlation statistic; the
//! formulas assume that statistic is well above one, and
//! [`VariancePrediction::is_gaussian_regime`] reports when it is not.

mod budget;
mod frequency;
mod kalman;
mod phase;

pub use budget::{
    combine_error_budget, predict_error_budget, BudgetInputs, ErrorBudget, RegimeFlags,
};
pub use frequency::{freq_estimate_oneshot, freq_variance_oneshot, oneshot_range_hz};
pub use kalman::{kf_steady_state_variance, kf_update, KalmanState};
pub use phase::{decode_feedback, feedback_variance, phase_estimate, phase_variance};

pub(crate) use frequency::freq_estimate_slice;
pub(crate) use phase::{decode_feedback_blocks, phase_estimate_slice};

/// Correlation-statistic SNR below which the variance formulas are no
/// longer trusted.
pub const MIN_STATISTIC_SNR: f64 = 6.0;

/// A predicted error variance and the SNR of the statistic it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariancePrediction {
    pub variance: f64,
    pub statistic_snr: f64,
}

impl VariancePrediction {
    pub fn is_gaussian_regime(&self) -> bool {
        self.statistic_snr >= MIN_STATISTIC_SNR
    }
}

/// How slaves obtain their frequency estimate each cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreqMode {
    /// Oneshot estimate from the current sync preamble only.
    Oneshot,
    /// Oneshot measurements smoothed across cycles by a scalar Kalman filter.
    Kalman,
}
