use core::f64::consts::PI;

use num_complex::Complex64;

use super::VariancePrediction;
use crate::error::{param_err, Result};
use crate::math::angle;
use crate::waveform::{SampleBuffer, ZcParams};

/// Oneshot carrier offset estimate from a repeated ZC preamble.
///
/// Correlates the received preamble with itself at a lag of one sequence
/// period over `(N_zc - 1)·M` products and converts the phase of the sum to
/// Hz. The first `N_zc·M` samples of `rx` are used.
pub fn freq_estimate_oneshot(rx: &SampleBuffer, zc: ZcParams) -> Result<f64> {
    let m = zc.length();
    let needed = zc.sync_samples();
    let s = rx.samples();
    if s.len() < needed {
        return Err(param_err!(
            "need {needed} samples for frequency estimation, got {}",
            s.len()
        ));
    }
    Ok(freq_estimate_slice(&s[..needed], m, rx.t_s()))
}

/// Lag-`m` autocorrelation estimate over all of `s`.
pub(crate) fn freq_estimate_slice(s: &[Complex64], m: usize, t_s: f64) -> f64 {
    let eta: Complex64 = s[..s.len() - m]
        .iter()
        .zip(&s[m..])
        .map(|(a, b)| a.conj() * b)
        .sum();
    angle(eta) / (2.0 * PI * t_s * m as f64)
}

/// Unambiguous half-range of the oneshot estimator, `1/(2·T_s·M)`.
pub fn oneshot_range_hz(zc: ZcParams, t_s: f64) -> f64 {
    1.0 / (2.0 * t_s * zc.length() as f64)
}

/// Error variance (Hz²) of [`freq_estimate_oneshot`] at downlink SNR
/// `gamma_dr`:
///
/// `(1/(M(N_zc-1)²γ) + 1/(2M(N_zc-1)γ²)) / (2πMT_s)²`
pub fn freq_variance_oneshot(zc: ZcParams, gamma_dr: f64, t_s: f64) -> VariancePrediction {
    let m = zc.length() as f64;
    let l = (zc.repetitions() - 1) as f64;
    let g = gamma_dr;
    let phase_var = 1.0 / (m * l * l * g) + 1.0 / (2.0 * m * l * g * g);
    let scale = 2.0 * PI * m * t_s;
    VariancePrediction {
        variance: phase_var / (scale * scale),
        statistic_snr: m * l * g,
    }
}
