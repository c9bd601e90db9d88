use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed when a dependency links std
use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};

use super::ScenarioConfig;
use crate::channel::{add_noise, ChannelTrace};
use crate::error::{param_err, Error, Result};
use crate::estimators::{
    freq_estimate_slice, freq_variance_oneshot, kf_update, FreqMode, KalmanState,
};
use crate::gain_model::gain_mean;
use crate::math::{angle, db_to_linear, wrap_phase, Moments};
use crate::rng::{stream, TRACE_NOISE_STREAM};
use crate::waveform::ZcParams;

/// SNR assumed for a trace that carries no capture SNR.
pub const DEFAULT_TRACE_SNR_DB: f64 = 30.0;

/// Outcome of replaying the protocol over a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EmulationResult {
    pub cycles: usize,
    /// Variance of the wrapped residual phases.
    pub var_e: f64,
    pub mean_residual: f64,
    /// `gain_mean(N, var_e)`.
    pub predicted_mean_gain: f64,
    /// Residual phase of every cycle.
    pub residuals: Vec<f64>,
}

/// Correlation of `rx` against the ZC sequence, with `rx[0]` at absolute
/// trace sample `offset`; a pure channel rotation `e^{jθ}` returns `θ`.
fn zc_correlate(rx: &[Complex64], period: &[Complex64], offset: usize) -> Complex64 {
    let m = period.len();
    rx.iter()
        .enumerate()
        .map(|(k, y)| period[(offset + k) % m].conj() * y)
        .sum()
}

fn derotate(samples: &mut [Complex64], first: usize, t_s: f64, f: f64, t_ref: f64) {
    for (k, x) in samples.iter_mut().enumerate() {
        let t = (first + k) as f64 * t_s;
        *x *= Complex64::from_polar(1.0, -2.0 * PI * f * (t - t_ref));
    }
}

/// Sample offsets of one cycle within a trace.
struct TraceLayout {
    stride: usize,
    phase_offset: usize,
    eval_start: usize,
    span: usize,
}

impl TraceLayout {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let w = &cfg.waveform;
        let stride = (w.t_cyc / w.t_s).round() as usize;
        let phase_offset = w.zc.sync_samples() + w.n_g1 + cfg.n_radios * w.n_ph + w.n_g2;
        let t_e = crate::waveform::evaluation_delay(w, cfg.n_radios, 1, cfg.payload_fraction)?;
        let eval_offset = phase_offset as f64 + 0.5 * w.n_ph as f64 + t_e / w.t_s;
        let eval_start = (eval_offset - 0.5 * w.n_ph as f64).round() as usize;
        Ok(Self {
            stride,
            phase_offset,
            eval_start,
            span: eval_start + w.n_ph,
        })
    }
}

/// Number of whole cycles [`emulate_trace`] can take from a trace of
/// `len` samples under `cfg`'s timing; `n_cycles` is ignored.
pub fn emulation_capacity(len: usize, cfg: &ScenarioConfig) -> Result<usize> {
    let layout = TraceLayout::new(cfg)?;
    Ok(if len < layout.span {
        0
    } else {
        (len - layout.span) / layout.stride + 1
    })
}

/// Replays the protocol timing of `cfg` over a captured repeating-ZC trace.
///
/// Cycle `k` starts at trace sample `k·t_cyc/t_s`. Frequency comes from the
/// sync window, phase from an `n_ph` window placed after the protocol delay
/// `t_g1 + N·t_ph + t_g2`, and the residual is measured `t_e` later on the
/// clean trace. Feedback is ideal. When `added_noise_snr` is given, noise at
/// that SNR corrupts the estimation windows only.
pub fn emulate_trace(
    trace: &ChannelTrace,
    cfg: &ScenarioConfig,
    added_noise_snr: Option<f64>,
) -> Result<EmulationResult> {
    cfg.validate()?;
    let w = &cfg.waveform;
    if ((trace.t_s - w.t_s) / w.t_s).abs() > 1e-9 {
        return Err(Error::Config(alloc::format!(
            "trace sampled at {} s but waveform uses {} s",
            trace.t_s,
            w.t_s
        )));
    }
    if let Some(snr) = added_noise_snr {
        if !(snr > 0.0) {
            return Err(param_err!("added noise SNR must be positive"));
        }
    }
    let t_s = w.t_s;
    let n_syn = w.zc.sync_samples();
    let m = w.zc.length();
    let TraceLayout {
        stride,
        phase_offset,
        eval_start,
        span,
    } = TraceLayout::new(cfg)?;
    let needed = (cfg.n_cycles - 1) * stride + span;
    if trace.len() < needed {
        return Err(param_err!(
            "trace of {} samples too short for {} cycles ({} needed)",
            trace.len(),
            cfg.n_cycles,
            needed
        ));
    }

    let period = w.zc.sequence();
    let noise_power = added_noise_snr.map(|snr| trace.mean_power() / snr);
    let est_snr = added_noise_snr
        .unwrap_or_else(|| db_to_linear(trace.capture_snr_db.unwrap_or(DEFAULT_TRACE_SNR_DB)));
    let r = freq_variance_oneshot(w.zc, est_snr, t_s).variance;
    let mut rng = stream(cfg.seed, TRACE_NOISE_STREAM);
    let mut tracker: Option<KalmanState> = None;
    let mut residuals = Vec::with_capacity(cfg.n_cycles);
    let mut buf = Vec::with_capacity(n_syn.max(w.n_ph));

    for k in 0..cfg.n_cycles {
        let base = k * stride;
        let samples = &trace.samples;
        buf.clear();
        buf.extend_from_slice(&samples[base..base + n_syn]);
        if let Some(p) = noise_power {
            add_noise(&mut buf, p, &mut rng);
        }
        let z = freq_estimate_slice(&buf, m, t_s);
        let f_hat = match cfg.freq_mode {
            FreqMode::Oneshot => z,
            FreqMode::Kalman => {
                let next = match tracker {
                    None => KalmanState::from_first_measurement(z, cfg.drift.q, r)?,
                    Some(prev) => kf_update(prev, z),
                };
                tracker = Some(next);
                next.x
            }
        };
        let t_ref = (base + n_syn) as f64 * t_s;

        let ph_start = base + phase_offset;
        buf.clear();
        buf.extend_from_slice(&samples[ph_start..ph_start + w.n_ph]);
        if let Some(p) = noise_power {
            add_noise(&mut buf, p, &mut rng);
        }
        derotate(&mut buf, ph_start, t_s, f_hat, t_ref);
        let phi_hat = angle(zc_correlate(&buf, &period, ph_start));

        let ev_start = base + eval_start;
        buf.clear();
        buf.extend_from_slice(&samples[ev_start..ev_start + w.n_ph]);
        derotate(&mut buf, ev_start, t_s, f_hat, t_ref);
        let residual = wrap_phase(angle(zc_correlate(&buf, &period, ev_start)) - phi_hat);
        residuals.push(residual);
    }

    let stats: Moments = residuals.iter().copied().collect();
    let var_e = if residuals.len() > 1 {
        stats.variance()
    } else {
        0.0
    };
    Ok(EmulationResult {
        cycles: residuals.len(),
        var_e,
        mean_residual: stats.mean(),
        predicted_mean_gain: gain_mean(cfg.n_radios, var_e),
        residuals,
    })
}

/// Builds a synthetic capture of a repeating ZC sequence through a channel
/// whose frequency performs a continuous Wiener walk.
///
/// `drift_rate` is the frequency variance growth in Hz² per second; noise
/// is added at `snr` when given.
pub fn synthetic_trace(
    zc: ZcParams,
    t_s: f64,
    n_samples: usize,
    initial_freq: f64,
    drift_rate: f64,
    snr: Option<f64>,
    seed: u64,
) -> Result<ChannelTrace> {
    if !(drift_rate >= 0.0) {
        return Err(param_err!("drift rate must be non-negative"));
    }
    let period = zc.sequence();
    let m = period.len();
    let mut rng = stream(seed, 0);
    let step_std = (drift_rate * t_s).sqrt();
    let mut f = initial_freq;
    let mut phase = 0.0f64;
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        samples.push(period[k % m] * Complex64::from_polar(1.0, phase));
        phase = wrap_phase(phase + 2.0 * PI * f * t_s);
        if step_std > 0.0 {
            let w: f64 = StandardNormal.sample(&mut rng);
            f += step_std * w;
        }
    }
    if let Some(snr) = snr {
        add_noise(&mut samples, 1.0 / snr, &mut stream(seed, 1));
    }
    ChannelTrace::new(samples, t_s, snr.map(crate::math::linear_to_db))
}
