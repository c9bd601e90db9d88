//! Radio-to-destination links.
//!
//! Every link is narrowband and flat: within one beamforming cycle it is a
//! constant amplitude, carrier frequency offset and phase offset. Frequency
//! offsets drift between cycles as a discrete Wiener process. All radios see
//! the same amplitude.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed when a dependency links std
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{param_err, Result};
use crate::math::{db_to_linear, wrap_phase};
use crate::waveform::SampleBuffer;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Thermal noise density at room temperature.
const NOISE_DENSITY_DBM_HZ: f64 = -174.0;

/// Channel state between one radio and the destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    /// Phase offset in radians, in `(-π, π]`.
    pub phase: f64,
    /// Carrier frequency offset in Hz (uplink sign).
    pub freq_offset: f64,
    /// Linear amplitude, shared by every radio.
    pub amplitude: f64,
}

impl LinkState {
    pub fn new(phase: f64, freq_offset: f64, amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0) {
            return Err(param_err!("link amplitude must be positive"));
        }
        Ok(Self {
            phase: wrap_phase(phase),
            freq_offset,
            amplitude,
        })
    }

    /// Draws a fresh phase uniformly on `(-π, π]`.
    pub fn redraw_phase<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.phase = wrap_phase(rng.random_range(-PI..PI));
    }
}

/// Wiener frequency drift between cycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftModel {
    /// Increment variance `q` in Hz² per cycle.
    pub q: f64,
    /// Cycle period in seconds.
    pub t_cyc: f64,
}

impl DriftModel {
    pub fn new(q: f64, t_cyc: f64) -> Result<Self> {
        if !(q >= 0.0) {
            return Err(param_err!("drift variance must be non-negative"));
        }
        Ok(Self { q, t_cyc })
    }
}

/// Advances a frequency offset by one cycle of Wiener drift.
pub fn step_drift<R: Rng + ?Sized>(f_prev: f64, drift: &DriftModel, rng: &mut R) -> f64 {
    if drift.q == 0.0 {
        return f_prev;
    }
    let w: f64 = StandardNormal.sample(rng);
    f_prev + drift.q.sqrt() * w
}

/// Linear per-sample SNRs of the two link directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPair {
    /// SNR at the destination from a single radio.
    pub gamma_pre: f64,
    /// SNR at a radio of the destination's transmissions.
    pub gamma_dr: f64,
}

impl SnrPair {
    pub fn new(gamma_pre: f64, gamma_dr: f64) -> Result<Self> {
        if !(gamma_pre > 0.0) || !(gamma_dr > 0.0) {
            return Err(param_err!("SNRs must be positive"));
        }
        Ok(Self {
            gamma_pre,
            gamma_dr,
        })
    }

    pub fn from_db(pre_db: f64, dr_db: f64) -> Result<Self> {
        Self::new(db_to_linear(pre_db), db_to_linear(dr_db))
    }

    /// Same SNR in both directions.
    pub fn symmetric(gamma: f64) -> Result<Self> {
        Self::new(gamma, gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Radio to destination: offset `+f_n`.
    Uplink,
    /// Destination to radio: offset `-f_n`.
    Downlink,
}

/// Passes `tx` through the link and adds AWGN.
///
/// `t0` is the time of the first sample relative to the cycle origin.
/// Noise is sized so that a unit-power input arrives at the given linear
/// per-sample SNR; an infinite SNR disables noise.
pub fn propagate<R: Rng + ?Sized>(
    tx: &SampleBuffer,
    link: &LinkState,
    snr: f64,
    direction: Direction,
    t0: f64,
    rng: &mut R,
) -> Result<SampleBuffer> {
    let mut out = tx.samples().to_vec();
    propagate_in_place(&mut out, tx.t_s(), link, snr, direction, t0, rng)?;
    SampleBuffer::new(out, tx.t_s())
}

/// In-place variant of [`propagate`] used on the simulation hot path.
pub fn propagate_in_place<R: Rng + ?Sized>(
    samples: &mut [Complex64],
    t_s: f64,
    link: &LinkState,
    snr: f64,
    direction: Direction,
    t0: f64,
    rng: &mut R,
) -> Result<()> {
    if !(snr > 0.0) {
        return Err(param_err!("SNR must be positive, got {snr}"));
    }
    let f = match direction {
        Direction::Uplink => link.freq_offset,
        Direction::Downlink => -link.freq_offset,
    };
    let a = link.amplitude;
    // Rotation is advanced by multiplication and re-anchored every block to
    // keep round-off below 1e-12.
    const ANCHOR: usize = 256;
    let step = Complex64::from_polar(1.0, 2.0 * PI * f * t_s);
    let mut rot = Complex64::new(0.0, 0.0);
    for (k, x) in samples.iter_mut().enumerate() {
        if k % ANCHOR == 0 {
            let t = t0 + k as f64 * t_s;
            rot = Complex64::from_polar(a, 2.0 * PI * f * t + link.phase);
        }
        *x *= rot;
        rot *= step;
    }
    if snr.is_finite() {
        let sigma = (a * a / (2.0 * snr)).sqrt();
        for x in samples.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *x += Complex64::new(sigma * re, sigma * im);
        }
    }
    Ok(())
}

/// Adds complex white Gaussian noise of total variance `noise_power`.
pub fn add_noise<R: Rng + ?Sized>(samples: &mut [Complex64], noise_power: f64, rng: &mut R) {
    if noise_power <= 0.0 {
        return;
    }
    let normal = Normal::new(0.0, (noise_power / 2.0).sqrt()).expect("finite deviation");
    for x in samples.iter_mut() {
        *x += Complex64::new(normal.sample(rng), normal.sample(rng));
    }
}

/// Inputs of the log-distance link budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetParams {
    pub tx_power_dbm: f64,
    pub dest_power_dbm: f64,
    pub pathloss_exp: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
    /// Distance of the free-space anchor in meters.
    pub ref_distance: f64,
}

impl LinkBudgetParams {
    /// Path loss in dB at `distance` meters: free space up to the reference
    /// distance, then `10·n·log10(d/d0)`.
    pub fn path_loss_db(&self, distance: f64) -> f64 {
        let lambda = SPEED_OF_LIGHT / self.carrier_hz;
        let fspl = 20.0 * (4.0 * PI * self.ref_distance / lambda).log10();
        fspl + 10.0 * self.pathloss_exp * (distance / self.ref_distance).log10()
    }

    pub fn noise_floor_dbm(&self) -> f64 {
        NOISE_DENSITY_DBM_HZ + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db
    }

    /// Reference distance such that a single radio's SNR at `distance`
    /// equals `snr_db`. Used to anchor the model to a measured operating
    /// point.
    pub fn ref_distance_for_anchor(&self, snr_db: f64, distance: f64) -> Result<f64> {
        let lambda = SPEED_OF_LIGHT / self.carrier_hz;
        let target_pl = self.tx_power_dbm - self.noise_floor_dbm() - snr_db;
        // PL = 20 log10(4π/λ) + 20 log10(d0) + 10 n (log10 d - log10 d0)
        let slope = 20.0 - 10.0 * self.pathloss_exp;
        let rest = target_pl
            - 20.0 * (4.0 * PI / lambda).log10()
            - 10.0 * self.pathloss_exp * distance.log10();
        if slope.abs() < 1e-12 {
            return Err(param_err!(
                "reference distance is not identifiable for a free-space exponent"
            ));
        }
        let d0 = 10.0.powf(rest / slope);
        if !(d0 > 0.0 && d0 <= distance) {
            return Err(param_err!(
                "anchor {snr_db} dB at {distance} m needs reference distance {d0} m"
            ));
        }
        Ok(d0)
    }
}

/// SNR pair of both link directions at `distance` meters.
pub fn link_budget(distance: f64, params: &LinkBudgetParams) -> Result<SnrPair> {
    if !(params.ref_distance > 0.0) || !(distance >= params.ref_distance) {
        return Err(param_err!(
            "distance {distance} m must be at least the reference distance {} m",
            params.ref_distance
        ));
    }
    if !(params.bandwidth_hz > 0.0) || !(params.carrier_hz > 0.0) {
        return Err(param_err!("bandwidth and carrier must be positive"));
    }
    let pl = params.path_loss_db(distance);
    let noise = params.noise_floor_dbm();
    SnrPair::from_db(
        params.tx_power_dbm - pl - noise,
        params.dest_power_dbm - pl - noise,
    )
}

/// Recorded complex baseband capture used for emulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    pub samples: Vec<Complex64>,
    /// Sampling period in seconds.
    pub t_s: f64,
    /// SNR of the capture in dB, when known.
    pub capture_snr_db: Option<f64>,
}

impl ChannelTrace {
    pub fn new(samples: Vec<Complex64>, t_s: f64, capture_snr_db: Option<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(param_err!("trace must not be empty"));
        }
        if !(t_s > 0.0) {
            return Err(param_err!("trace sampling period must be positive"));
        }
        Ok(Self {
            samples,
            t_s,
            capture_snr_db,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.t_s
    }

    pub fn sample_rate_hz(&self) -> f64 {
        1.0 / self.t_s
    }

    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.len() as f64
    }
}
