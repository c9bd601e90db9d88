//! Sample-level Monte Carlo of full beamforming cycles, plus replay of
//! recorded channel traces.
//!
//! A cycle runs synchronization, per-radio phase estimation, phase feedback
//! and the cooperative payload. Waveforms pass through [`crate::channel`] in
//! both directions; the destination and each radio only see the samples they
//! would receive. Guard intervals are idle and are not propagated.

mod campaign;
mod cycle;
mod emulate;

pub use campaign::{
    error_breakdown, run_campaign, run_campaign_with, CycleBatch, RadioBreakdown, RunSummary,
    StageVariances, SummaryBuilder, CDF_POINTS,
};
pub use cycle::{run_cycle, CycleResult, ErrorComponents, RadioState, Simulator};
pub use emulate::{
    emulate_trace, emulation_capacity, synthetic_trace, EmulationResult, DEFAULT_TRACE_SNR_DB,
};

pub use crate::estimators::FreqMode;

use crate::channel::{DriftModel, SnrPair};
use crate::error::{param_err, Result};
use crate::estimators::{predict_error_budget, BudgetInputs, ErrorBudget};
use crate::gain_model::gain_mean;
use crate::waveform::{evaluation_delay, WaveformConfig};
use alloc::vec::Vec;

/// Default half-width of the uniform initial frequency offsets in Hz.
pub const DEFAULT_INITIAL_FREQ_HZ: f64 = 1000.0;
/// Default number of unrecorded Kalman warm-up cycles.
pub const DEFAULT_BURN_IN_CYCLES: usize = 50;

/// Everything that defines one simulation campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub waveform: WaveformConfig,
    pub n_radios: usize,
    pub snr: SnrPair,
    pub drift: DriftModel,
    pub freq_mode: FreqMode,
    /// Recorded cycles.
    pub n_cycles: usize,
    pub seed: u64,
    /// Evaluation instant as a fraction of the payload.
    pub payload_fraction: f64,
    /// Kalman cycles run before recording starts. Ignored in oneshot mode.
    pub burn_in_cycles: usize,
    /// Initial offsets are uniform on `±initial_freq_hz`.
    pub initial_freq_hz: f64,
    /// Post-beamforming SNR threshold for the empirical outage.
    pub gamma_min: Option<f64>,
}

impl ScenarioConfig {
    /// A campaign with default drift-free channel and payload-midpoint
    /// evaluation.
    pub fn new(waveform: WaveformConfig, n_radios: usize, snr: SnrPair) -> Self {
        Self {
            waveform,
            n_radios,
            snr,
            drift: DriftModel {
                q: 0.0,
                t_cyc: waveform.t_cyc,
            },
            freq_mode: FreqMode::Oneshot,
            n_cycles: 1000,
            seed: 0,
            payload_fraction: 0.5,
            burn_in_cycles: DEFAULT_BURN_IN_CYCLES,
            initial_freq_hz: DEFAULT_INITIAL_FREQ_HZ,
            gamma_min: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.waveform.validate(self.n_radios)?;
        if self.n_cycles == 0 {
            return Err(param_err!("at least one cycle is required"));
        }
        if !(0.0..=1.0).contains(&self.payload_fraction) {
            return Err(param_err!("payload fraction must be in [0, 1]"));
        }
        if !(self.initial_freq_hz >= 0.0) {
            return Err(param_err!("initial frequency spread must be non-negative"));
        }
        if !(self.drift.q >= 0.0) {
            return Err(param_err!("drift variance must be non-negative"));
        }
        if let Some(g) = self.gamma_min {
            if !(g > 0.0) {
                return Err(param_err!("outage threshold must be positive"));
            }
        }
        Ok(())
    }

    /// Cycles actually simulated, including burn-in.
    pub fn total_cycles(&self) -> usize {
        match self.freq_mode {
            FreqMode::Oneshot => self.n_cycles,
            FreqMode::Kalman => self.n_cycles + self.burn_in_cycles,
        }
    }

    /// Closed-form error budget of each radio (1-based slot order).
    pub fn predicted_budgets(&self) -> Result<Vec<ErrorBudget>> {
        let w = &self.waveform;
        (1..=self.n_radios)
            .map(|slave| {
                let t_e = evaluation_delay(w, self.n_radios, slave, self.payload_fraction)?;
                predict_error_budget(&BudgetInputs {
                    zc: w.zc,
                    n_ph: w.n_ph,
                    n_fb: w.n_fb,
                    t_s: w.t_s,
                    t_e,
                    snr: self.snr,
                    mode: self.freq_mode,
                    q: self.drift.q,
                })
            })
            .collect()
    }

    /// Framework mean gain using the radio-averaged predicted `σ²_e`.
    pub fn predicted_mean_gain(&self) -> Result<f64> {
        let budgets = self.predicted_budgets()?;
        let var_e = budgets.iter().map(|b| b.var_e).sum::<f64>() / budgets.len() as f64;
        Ok(gain_mean(self.n_radios, var_e))
    }
}
