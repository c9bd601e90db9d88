use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use super::ScenarioConfig;
use crate::channel::{propagate_in_place, step_drift, Direction, LinkState};
use crate::error::Result;
use crate::estimators::{
    decode_feedback_blocks, freq_estimate_slice, freq_variance_oneshot, kf_update,
    phase_estimate_slice, FreqMode, KalmanState,
};
use crate::math::{angle, wrap_phase};
use crate::rng::{cycle_stream, drift_stream, stream, INIT_STREAM};
use crate::waveform::make_phase_preamble;

/// Seeds of the fixed phase and feedback preambles.
const PHASE_PREAMBLE_SEED: u64 = 0x5048;
const FEEDBACK_PREAMBLE_SEED: u64 = 0x4642;

/// Channel and tracker state of one radio, carried across cycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioState {
    pub link: LinkState,
    /// Kalman frequency tracker; `None` until the first measurement.
    pub tracker: Option<KalmanState>,
}

/// Wrapped per-stage contributions to one radio's combining phase error.
/// They sum to the phase error modulo 2π.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorComponents {
    /// Residual frequency error accumulated from phase estimation to
    /// evaluation.
    pub freq: f64,
    /// Destination phase estimation error.
    pub phase: f64,
    /// Feedback decoding error.
    pub feedback: f64,
}

/// Outcome of one simulated cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    pub cycle: u64,
    pub gain: f64,
    /// Combining phase error of each radio at the evaluation instant.
    pub phase_errors: Vec<f64>,
    /// True minus applied frequency correction, in Hz.
    pub freq_errors: Vec<f64>,
    pub components: Vec<ErrorComponents>,
}

/// Precomputed waveforms for a campaign.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: ScenarioConfig,
    sync: Vec<Complex64>,
    phase_preamble: Vec<Complex64>,
    feedback_preamble: Vec<Complex64>,
    /// Oneshot measurement variance fed to the Kalman trackers.
    measurement_var: f64,
}

/// Multiplies `samples` by `exp(j(2πf·t + phase))` with `t = t0 + k·t_s`.
fn rotate(samples: &mut [Complex64], t0: f64, t_s: f64, f: f64, phase: f64) {
    const ANCHOR: usize = 256;
    let step = Complex64::from_polar(1.0, 2.0 * PI * f * t_s);
    let mut rot = Complex64::new(1.0, 0.0);
    for (k, x) in samples.iter_mut().enumerate() {
        if k % ANCHOR == 0 {
            rot = Complex64::from_polar(1.0, 2.0 * PI * f * (t0 + k as f64 * t_s) + phase);
        }
        *x *= rot;
        rot *= step;
    }
}

impl Simulator {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let w = &cfg.waveform;
        let mut sync = Vec::with_capacity(w.zc.sync_samples());
        let period = w.zc.sequence();
        for _ in 0..w.zc.repetitions() {
            sync.extend_from_slice(&period);
        }
        let phase_preamble =
            make_phase_preamble(w.n_ph, PHASE_PREAMBLE_SEED, w.t_s)?.into_samples();
        let feedback_preamble =
            make_phase_preamble(w.n_fb, FEEDBACK_PREAMBLE_SEED, w.t_s)?.into_samples();
        let measurement_var = freq_variance_oneshot(w.zc, cfg.snr.gamma_dr, w.t_s).variance;
        Ok(Self {
            cfg,
            sync,
            phase_preamble,
            feedback_preamble,
            measurement_var,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    /// Radio states before the first cycle: offsets uniform on
    /// `±initial_freq_hz`, unit amplitude.
    pub fn initial_states(&self) -> Vec<RadioState> {
        let mut rng = stream(self.cfg.seed, INIT_STREAM);
        let spread = self.cfg.initial_freq_hz;
        (0..self.cfg.n_radios)
            .map(|_| {
                let f = if spread > 0.0 {
                    rng.random_range(-spread..spread)
                } else {
                    0.0
                };
                RadioState {
                    link: LinkState {
                        phase: 0.0,
                        freq_offset: f,
                        amplitude: 1.0,
                    },
                    tracker: None,
                }
            })
            .collect()
    }

    /// Applies the drift between cycle `cycle - 1` and `cycle`. Cycle 0 uses
    /// the initial offsets unchanged.
    pub fn drift_states(&self, states: &mut [RadioState], cycle: u64) {
        if cycle == 0 {
            return;
        }
        let mut rng = drift_stream(self.cfg.seed, cycle);
        for s in states.iter_mut() {
            s.link.freq_offset = step_drift(s.link.freq_offset, &self.cfg.drift, &mut rng);
        }
    }

    /// Runs all four protocol stages of cycle `cycle`.
    ///
    /// Channel phases are redrawn first; trackers in `states` are updated in
    /// Kalman mode. Frequency offsets are used as they are, so call
    /// [`Self::drift_states`] beforehand.
    pub fn run_cycle(&self, states: &mut [RadioState], cycle: u64) -> Result<CycleResult> {
        let cfg = &self.cfg;
        let w = &cfg.waveform;
        let n = cfg.n_radios;
        let t_s = w.t_s;
        let m = w.zc.length();
        let mut rng = cycle_stream(cfg.seed, cycle);
        for s in states.iter_mut() {
            s.link.redraw_phase(&mut rng);
        }
        // Frequency corrections are referenced to the end of the sync preamble.
        let t_ref = w.zc.sync_samples() as f64 * t_s;
        let mut buf: Vec<Complex64> = Vec::with_capacity(self.sync.len());

        // Synchronization: every radio estimates its offset from the same
        // destination preamble.
        let mut f_hat = Vec::with_capacity(n);
        for s in states.iter_mut() {
            buf.clear();
            buf.extend_from_slice(&self.sync);
            propagate_in_place(
                &mut buf,
                t_s,
                &s.link,
                cfg.snr.gamma_dr,
                Direction::Downlink,
                0.0,
                &mut rng,
            )?;
            let z = -freq_estimate_slice(&buf, m, t_s);
            let estimate = match cfg.freq_mode {
                FreqMode::Oneshot => z,
                FreqMode::Kalman => {
                    let next = match s.tracker {
                        None => KalmanState::from_first_measurement(
                            z,
                            cfg.drift.q,
                            self.measurement_var,
                        )?,
                        Some(prev) => kf_update(prev, z),
                    };
                    s.tracker = Some(next);
                    next.x
                }
            };
            f_hat.push(estimate);
        }

        // Channel estimation: each radio sends the known preamble in its slot,
        // already corrected by its frequency estimate.
        let mut phi_hat = Vec::with_capacity(n);
        let mut phase_err = Vec::with_capacity(n);
        let mut slot_centers = Vec::with_capacity(n);
        for (i, s) in states.iter().enumerate() {
            let start = w.phase_slot_start(i + 1);
            let t0 = start as f64 * t_s;
            buf.clear();
            buf.extend_from_slice(&self.phase_preamble);
            rotate(&mut buf, t0, t_s, -f_hat[i], 2.0 * PI * f_hat[i] * t_ref);
            propagate_in_place(
                &mut buf,
                t_s,
                &s.link,
                cfg.snr.gamma_pre,
                Direction::Uplink,
                t0,
                &mut rng,
            )?;
            let estimate = phase_estimate_slice(&buf, &self.phase_preamble);
            // The correlation recovers the phase at the slot center.
            let t_c = (start as f64 + 0.5 * (w.n_ph - 1) as f64) * t_s;
            let df = s.link.freq_offset - f_hat[i];
            let truth = 2.0 * PI * (df * t_c + f_hat[i] * t_ref) + s.link.phase;
            phi_hat.push(estimate);
            phase_err.push(wrap_phase(truth - estimate));
            slot_centers.push(t_c);
        }

        // Feedback: the destination broadcasts a reference block and one
        // block per radio rotated by that radio's phase estimate. Each radio
        // receives its two blocks, removes its frequency estimate and decodes.
        let fb_start = w.feedback_start(n);
        let mut block = Vec::with_capacity(w.n_fb);
        let mut phi_fb = Vec::with_capacity(n);
        for (i, s) in states.iter().enumerate() {
            let t_ref_block = fb_start as f64 * t_s;
            buf.clear();
            buf.extend_from_slice(&self.feedback_preamble);
            propagate_in_place(
                &mut buf,
                t_s,
                &s.link,
                cfg.snr.gamma_dr,
                Direction::Downlink,
                t_ref_block,
                &mut rng,
            )?;
            rotate(&mut buf, t_ref_block, t_s, f_hat[i], 0.0);

            let t_block = (fb_start + (i + 1) * w.n_fb) as f64 * t_s;
            let rot = Complex64::from_polar(1.0, phi_hat[i]);
            block.clear();
            block.extend(self.feedback_preamble.iter().map(|&x| x * rot));
            propagate_in_place(
                &mut block,
                t_s,
                &s.link,
                cfg.snr.gamma_dr,
                Direction::Downlink,
                t_block,
                &mut rng,
            )?;
            rotate(&mut block, t_block, t_s, f_hat[i], 0.0);
            phi_fb.push(decode_feedback_blocks(&buf, &block));
        }

        // Cooperative payload, evaluated on one noiseless sample.
        let t_eval = w.evaluation_instant(n, cfg.payload_fraction) * t_s;
        let mut combined = Complex64::new(0.0, 0.0);
        let mut energy = 0.0;
        let mut phase_errors = Vec::with_capacity(n);
        let mut freq_errors = Vec::with_capacity(n);
        let mut components = Vec::with_capacity(n);
        for (i, s) in states.iter().enumerate() {
            let mut sample = [Complex64::from_polar(
                1.0,
                -2.0 * PI * f_hat[i] * (t_eval - t_ref) - phi_fb[i],
            )];
            propagate_in_place(
                &mut sample,
                t_s,
                &s.link,
                f64::INFINITY,
                Direction::Uplink,
                t_eval,
                &mut rng,
            )?;
            combined += sample[0];
            energy += s.link.amplitude * s.link.amplitude;
            phase_errors.push(angle(sample[0]));
            let df = s.link.freq_offset - f_hat[i];
            freq_errors.push(df);
            components.push(ErrorComponents {
                freq: wrap_phase(2.0 * PI * df * (t_eval - slot_centers[i])),
                phase: phase_err[i],
                feedback: wrap_phase(phi_hat[i] - phi_fb[i]),
            });
        }
        Ok(CycleResult {
            cycle,
            gain: combined.norm_sqr() / energy,
            phase_errors,
            freq_errors,
            components,
        })
    }
}

/// Runs cycle `cycle` of `cfg` on `states`, drift included.
pub fn run_cycle(
    states: &mut [RadioState],
    cfg: &ScenarioConfig,
    cycle: u64,
) -> Result<CycleResult> {
    let sim = Simulator::new(cfg.clone())?;
    sim.drift_states(states, cycle);
    sim.run_cycle(states, cycle)
}
