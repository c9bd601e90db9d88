use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed when a dependency links std
use num_traits::Float;

use super::cycle::{CycleResult, RadioState, Simulator};
use super::ScenarioConfig;
use crate::error::{param_err, Result};
use crate::estimators::{FreqMode, RegimeFlags};
use crate::math::Moments;

/// Points on the reported empirical gain CDF grid, evenly spaced on `[0, N]`.
pub const CDF_POINTS: usize = 101;
/// Oneshot cycles handed to the executor at a time.
const BATCH_CYCLES: usize = 4096;

/// Independent oneshot cycles ready to run: cycle index and radio states
/// after drift.
pub type CycleBatch = Vec<(u64, Vec<RadioState>)>;

/// Per-stage phase error variances in rad².
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageVariances {
    pub freq: f64,
    pub phase: f64,
    pub feedback: f64,
    pub total: f64,
}

/// Empirical and closed-form error breakdown of one radio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioBreakdown {
    /// 1-based slot order.
    pub radio: usize,
    pub empirical: StageVariances,
    pub predicted: StageVariances,
    /// Mean of the combining phase error.
    pub mean_error: f64,
    /// Empirical residual frequency error variance in Hz².
    pub freq_error_var: f64,
}

/// Aggregate statistics of a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub n_radios: usize,
    pub freq_mode: FreqMode,
    pub n_cycles: usize,
    pub mean_gain: f64,
    pub gain_std_dev: f64,
    pub gain_std_err: f64,
    pub predicted_mean_gain: f64,
    /// Radio-averaged predicted `σ²_e`.
    pub predicted_var_e: f64,
    /// Pooled empirical variance of the wrapped phase errors.
    pub var_e: f64,
    /// `(g, P(G ≤ g))` on [`CDF_POINTS`] points.
    pub gain_cdf: Vec<(f64, f64)>,
    pub gamma_min: Option<f64>,
    /// Fraction of cycles with `N·γ_pre·G < γ_min`.
    pub outage: Option<f64>,
    pub breakdown: Vec<RadioBreakdown>,
    /// Regime flags raised by any radio's predicted budget.
    pub regime: RegimeFlags,
    /// Per-cycle gains in cycle order.
    pub gains: Vec<f64>,
}

impl RunSummary {
    /// Breakdown averaged over radios.
    pub fn pooled_breakdown(&self) -> (StageVariances, StageVariances) {
        let n = self.breakdown.len() as f64;
        let mut emp = StageVariances::default();
        let mut pred = StageVariances::default();
        for b in &self.breakdown {
            for (acc, v) in [(&mut emp, &b.empirical), (&mut pred, &b.predicted)] {
                acc.freq += v.freq / n;
                acc.phase += v.phase / n;
                acc.feedback += v.feedback / n;
                acc.total += v.total / n;
            }
        }
        (emp, pred)
    }
}

/// Per-stage variances of every radio, empirical next to predicted.
pub fn error_breakdown(summary: &RunSummary) -> Vec<RadioBreakdown> {
    summary.breakdown.clone()
}

#[derive(Debug, Clone, Default)]
struct RadioAccumulator {
    freq: Moments,
    phase: Moments,
    feedback: Moments,
    total: Moments,
    freq_error: Moments,
}

/// Folds cycle results, in order, into a [`RunSummary`].
#[derive(Debug, Clone)]
pub struct SummaryBuilder {
    cfg: ScenarioConfig,
    gains: Vec<f64>,
    gain_moments: Moments,
    pooled_error: Moments,
    radios: Vec<RadioAccumulator>,
    outages: u64,
}

impl SummaryBuilder {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        Self {
            cfg: cfg.clone(),
            gains: Vec::with_capacity(cfg.n_cycles),
            gain_moments: Moments::new(),
            pooled_error: Moments::new(),
            radios: alloc::vec![RadioAccumulator::default(); cfg.n_radios],
            outages: 0,
        }
    }

    pub fn push(&mut self, r: &CycleResult) {
        self.gains.push(r.gain);
        self.gain_moments.push(r.gain);
        if let Some(g_min) = self.cfg.gamma_min {
            let post = self.cfg.n_radios as f64 * self.cfg.snr.gamma_pre * r.gain;
            if post < g_min {
                self.outages += 1;
            }
        }
        for (i, acc) in self.radios.iter_mut().enumerate() {
            let k = &r.components[i];
            acc.freq.push(k.freq);
            acc.phase.push(k.phase);
            acc.feedback.push(k.feedback);
            acc.total.push(r.phase_errors[i]);
            acc.freq_error.push(r.freq_errors[i]);
            self.pooled_error.push(r.phase_errors[i]);
        }
    }

    pub fn finish(self) -> Result<RunSummary> {
        if self.gains.is_empty() {
            return Err(param_err!("no cycles recorded"));
        }
        let budgets = self.cfg.predicted_budgets()?;
        let n = self.cfg.n_radios;
        let mut sorted = self.gains.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let count = sorted.len() as f64;
        let gain_cdf = (0..CDF_POINTS)
            .map(|j| {
                let g = n as f64 * j as f64 / (CDF_POINTS - 1) as f64;
                (g, sorted.partition_point(|&x| x <= g) as f64 / count)
            })
            .collect();
        let mut regime = RegimeFlags::default();
        let breakdown = self
            .radios
            .iter()
            .zip(&budgets)
            .enumerate()
            .map(|(i, (acc, b))| {
                regime.low_statistic_snr |= b.regime.low_statistic_snr;
                regime.phase_wrapping |= b.regime.phase_wrapping;
                RadioBreakdown {
                    radio: i + 1,
                    empirical: StageVariances {
                        freq: acc.freq.variance(),
                        phase: acc.phase.variance(),
                        feedback: acc.feedback.variance(),
                        total: acc.total.variance(),
                    },
                    predicted: StageVariances {
                        freq: (2.0 * PI * b.t_e).powi(2) * b.var_f,
                        phase: b.var_ph,
                        feedback: b.var_fb,
                        total: b.var_e,
                    },
                    mean_error: acc.total.mean(),
                    freq_error_var: acc.freq_error.variance(),
                }
            })
            .collect();
        let predicted_var_e = budgets.iter().map(|b| b.var_e).sum::<f64>() / n as f64;
        Ok(RunSummary {
            n_radios: n,
            freq_mode: self.cfg.freq_mode,
            n_cycles: self.gains.len(),
            mean_gain: self.gain_moments.mean(),
            gain_std_dev: self.gain_moments.std_dev(),
            gain_std_err: self.gain_moments.std_err(),
            predicted_mean_gain: crate::gain_model::gain_mean(n, predicted_var_e),
            predicted_var_e,
            var_e: self.pooled_error.variance(),
            gain_cdf,
            gamma_min: self.cfg.gamma_min,
            outage: self.cfg.gamma_min.map(|_| self.outages as f64 / count),
            breakdown,
            regime,
            gains: self.gains,
        })
    }
}

/// Runs a campaign on the calling thread.
pub fn run_campaign(cfg: &ScenarioConfig) -> Result<RunSummary> {
    run_campaign_with(cfg, |sim, batch| {
        batch
            .into_iter()
            .map(|(c, mut states)| sim.run_cycle(&mut states, c))
            .collect()
    })
}

/// Runs a campaign, handing batches of independent oneshot cycles to
/// `execute`, which must return one result per input in the same order.
///
/// Kalman campaigns carry filter state from cycle to cycle and always run
/// sequentially. Results are folded in cycle order either way, so the
/// summary does not depend on how `execute` schedules work.
pub fn run_campaign_with<E>(cfg: &ScenarioConfig, mut execute: E) -> Result<RunSummary>
where
    E: FnMut(&Simulator, CycleBatch) -> Vec<Result<CycleResult>>,
{
    let sim = Simulator::new(cfg.clone())?;
    let mut builder = SummaryBuilder::new(cfg);
    let mut states = sim.initial_states();
    let total = cfg.total_cycles() as u64;
    match cfg.freq_mode {
        FreqMode::Kalman => {
            let burn_in = cfg.burn_in_cycles as u64;
            for c in 0..total {
                sim.drift_states(&mut states, c);
                let r = sim.run_cycle(&mut states, c)?;
                if c >= burn_in {
                    builder.push(&r);
                }
            }
        }
        FreqMode::Oneshot => {
            let mut next = 0u64;
            while next < total {
                let end = (next + BATCH_CYCLES as u64).min(total);
                let batch: CycleBatch = (next..end)
                    .map(|c| {
                        sim.drift_states(&mut states, c);
                        (c, states.clone())
                    })
                    .collect();
                let results = execute(&sim, batch);
                if results.len() != (end - next) as usize {
                    return Err(param_err!("executor returned a wrong number of results"));
                }
                for r in results {
                    builder.push(&r?);
                }
                next = end;
            }
        }
    }
    builder.finish()
}
