use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed when a dependency links std
use num_traits::Float;

use super::{
    feedback_variance, freq_variance_oneshot, kf_steady_state_variance, phase_variance, FreqMode,
    VariancePrediction,
};

use crate::channel::SnrPair;
use crate::error::{param_err, Result};
use crate::waveform::ZcParams;

/// Combined phase error standard deviation above which wrapping makes the
/// Gaussian error model unreliable.
const WRAP_LIMIT_STD: f64 = PI / 2.0;

/// Which modelling assumptions a budget violates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RegimeFlags {
    /// Some correlation statistic is below [`super::MIN_STATISTIC_SNR`].
    pub low_statistic_snr: bool,
    /// The combined phase error is wide enough for wrapping to matter.
    pub phase_wrapping: bool,
}

impl RegimeFlags {
    pub fn is_gaussian(&self) -> bool {
        !self.low_statistic_snr && !self.phase_wrapping
    }
}

/// Per-stage variances and the combined phase error variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    /// Residual frequency error variance in Hz².
    pub var_f: f64,
    pub var_ph: f64,
    pub var_fb: f64,
    /// Delay from phase estimation to evaluation in seconds.
    pub t_e: f64,
    /// `(2π t_e)² var_f + var_ph + var_fb`.
    pub var_e: f64,
    pub regime: RegimeFlags,
}

impl ErrorBudget {
    /// Frequency term of `var_e` in rad².
    pub fn freq_phase_var(&self) -> f64 {
        let w = 2.0 * PI * self.t_e;
        w * w * self.var_f
    }
}

pub fn combine_error_budget(var_f: f64, var_ph: f64, var_fb: f64, t_e: f64) -> ErrorBudget {
    let w = 2.0 * PI * t_e;
    let var_e = w * w * var_f + var_ph + var_fb;
    ErrorBudget {
        var_f,
        var_ph,
        var_fb,
        t_e,
        var_e,
        regime: RegimeFlags {
            low_statistic_snr: false,
            phase_wrapping: var_e.sqrt() > WRAP_LIMIT_STD,
        },
    }
}

/// Everything needed to predict a cycle's error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetInputs {
    pub zc: ZcParams,
    pub n_ph: usize,
    pub n_fb: usize,
    pub t_s: f64,
    pub t_e: f64,
    pub snr: SnrPair,
    pub mode: FreqMode,
    /// Frequency drift variance per cycle, used in Kalman mode.
    pub q: f64,
}

/// Closed-form budget for the given waveform, SNRs and frequency mode.
pub fn predict_error_budget(inputs: &BudgetInputs) -> Result<ErrorBudget> {
    if inputs.n_ph == 0 || inputs.n_fb == 0 {
        return Err(param_err!("preamble lengths must be positive"));
    }
    if !(inputs.t_e >= 0.0) {
        return Err(param_err!("evaluation delay must be non-negative"));
    }
    let oneshot = freq_variance_oneshot(inputs.zc, inputs.snr.gamma_dr, inputs.t_s);
    let var_f = match inputs.mode {
        FreqMode::Oneshot => oneshot.variance,
        FreqMode::Kalman => kf_steady_state_variance(inputs.q, oneshot.variance)?,
    };
    let ph = phase_variance(inputs.n_ph, inputs.snr.gamma_pre);
    let fb = feedback_variance(inputs.n_fb, inputs.snr.gamma_dr);
    let mut budget = combine_error_budget(var_f, ph.variance, fb.variance, inputs.t_e);
    budget.regime.low_statistic_snr = [oneshot, ph, fb]
        .iter()
        .any(|p: &VariancePrediction| !p.is_gaussian_regime());
    Ok(budget)
}
