use num_complex::Complex64;

use super::VariancePrediction;
use crate::error::{param_err, Result};
use crate::math::angle;
use crate::waveform::SampleBuffer;

/// Phase of `rx` relative to the known preamble, `∠ Σ known*[k]·rx[k]`.
pub fn phase_estimate(rx: &SampleBuffer, known: &SampleBuffer) -> Result<f64> {
    if rx.len() != known.len() {
        return Err(param_err!(
            "phase estimate needs equal lengths, got {} and {}",
            rx.len(),
            known.len()
        ));
    }
    Ok(phase_estimate_slice(rx.samples(), known.samples()))
}

pub(crate) fn phase_estimate_slice(rx: &[Complex64], known: &[Complex64]) -> f64 {
    angle(known.iter().zip(rx).map(|(x, y)| x.conj() * y).sum())
}

/// `1 / (2·N_ph·γ_preBF)`.
pub fn phase_variance(n_ph: usize, gamma_pre: f64) -> VariancePrediction {
    let snr = n_ph as f64 * gamma_pre;
    VariancePrediction {
        variance: 1.0 / (2.0 * snr),
        statistic_snr: snr,
    }
}

/// Decodes radio `slave`'s feedback phase from a received burst: the angle
/// of `Σ rx*[k]·rx[k + slave·N_fb]` over the first `N_fb` samples.
pub fn decode_feedback(rx: &SampleBuffer, slave: usize, n_fb: usize) -> Result<f64> {
    let s = rx.samples();
    if n_fb == 0 || s.len() < (slave + 1) * n_fb {
        return Err(param_err!(
            "burst of {} samples too short for slave {slave} with N_fb = {n_fb}",
            s.len()
        ));
    }
    let offset = slave * n_fb;
    Ok(decode_feedback_blocks(
        &s[..n_fb],
        &s[offset..offset + n_fb],
    ))
}

pub(crate) fn decode_feedback_blocks(reference: &[Complex64], block: &[Complex64]) -> f64 {
    angle(reference.iter().zip(block).map(|(a, b)| a.conj() * b).sum())
}

/// `1/(N_fb·γ_DR) + 1/(2·N_fb·γ_DR²)`.
pub fn feedback_variance(n_fb: usize, gamma_dr: f64) -> VariancePrediction {
    let n = n_fb as f64;
    let g = gamma_dr;
    VariancePrediction {
        variance: 1.0 / (n * g) + 1.0 / (2.0 * n * g * g),
        statistic_snr: n * g,
    }
}
