//! Protocol preambles and cycle timing.
//!
//! A beamforming cycle for `N` radios is laid out in samples as
//!
//! ```text
//! | sync (N_zc·M) | g1 | phase slot 1 .. N (N_ph each) | g2 | feedback ((N+1)·N_fb) | g3 | payload |
//! ```
//!
//! Guard intervals carry no signal.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed when a dependency links std
use num_traits::Float;
use rand::Rng;

use crate::error::{param_err, Error, Result};
use crate::rng;

/// Zadoff-Chu synchronization preamble parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZcParams {
    root: u32,
    length: usize,
    repetitions: usize,
}

impl ZcParams {
    pub fn new(root: u32, length: usize, repetitions: usize) -> Result<Self> {
        if length == 0 {
            return Err(param_err!("ZC length must be positive"));
        }
        if root == 0 || gcd(root as usize, length) != 1 {
            return Err(param_err!(
                "ZC root {root} is not coprime with length {length}"
            ));
        }
        if repetitions < 2 {
            return Err(param_err!(
                "ZC preamble needs at least two repetitions, got {repetitions}"
            ));
        }
        Ok(Self {
            root,
            length,
            repetitions,
        })
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    /// Sequence length `M` in samples.
    pub fn length(&self) -> usize {
        self.length
    }

    /// Number of repetitions `N_zc`.
    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    /// Total synchronization preamble length `N_syn = N_zc·M`.
    pub fn sync_samples(&self) -> usize {
        self.length * self.repetitions
    }

    pub fn with_repetitions(&self, repetitions: usize) -> Result<Self> {
        Self::new(self.root, self.length, repetitions)
    }

    /// One period of the sequence, `exp(-jπ u k (k + c) / M)` with
    /// `c = M mod 2`.
    pub fn sequence(&self) -> Vec<Complex64> {
        let m = self.length as u64;
        let c = m % 2;
        let u = self.root as u64;
        (0..m)
            .map(|k| {
                // Reduce the exponent modulo 2M before converting to f64.
                let e = (u * (k * (k + c) % (2 * m))) % (2 * m);
                Complex64::from_polar(1.0, -PI * e as f64 / m as f64)
            })
            .collect()
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Complex baseband samples at a fixed sampling period.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBuffer {
    samples: Vec<Complex64>,
    t_s: f64,
}

impl SampleBuffer {
    pub fn new(samples: Vec<Complex64>, t_s: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(param_err!("sample buffer must not be empty"));
        }
        if !(t_s > 0.0) {
            return Err(param_err!("sampling period must be positive"));
        }
        Ok(Self { samples, t_s })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn t_s(&self) -> f64 {
        self.t_s
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.len() as f64
    }
}

/// Builds the synchronization preamble: `N_zc` back-to-back copies of one
/// ZC period.
pub fn make_zc_preamble(zc: ZcParams, t_s: f64) -> Result<SampleBuffer> {
    let period = zc.sequence();
    let mut out = Vec::with_capacity(zc.sync_samples());
    for _ in 0..zc.repetitions() {
        out.extend_from_slice(&period);
    }
    SampleBuffer::new(out, t_s)
}

/// Known phase-estimation preamble: unit-modulus samples with phases drawn
/// uniformly from a stream seeded by `seed`.
pub fn make_phase_preamble(n_ph: usize, seed: u64, t_s: f64) -> Result<SampleBuffer> {
    if n_ph == 0 {
        return Err(param_err!("phase preamble length must be positive"));
    }
    let mut rng = rng::stream(seed, 0);
    let samples = (0..n_ph)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(-PI..PI)))
        .collect();
    SampleBuffer::new(samples, t_s)
}

/// In-band phase feedback burst: the reference preamble followed by one copy
/// rotated by each radio's phase.
pub fn make_feedback_burst(preamble: &SampleBuffer, phases: &[f64]) -> Result<SampleBuffer> {
    if phases.is_empty() {
        return Err(param_err!("feedback burst needs at least one phase"));
    }
    let block = preamble.samples();
    let mut out = Vec::with_capacity(block.len() * (phases.len() + 1));
    out.extend_from_slice(block);
    for &phi in phases {
        let rot = Complex64::from_polar(1.0, phi);
        out.extend(block.iter().map(|&x| x * rot));
    }
    SampleBuffer::new(out, preamble.t_s())
}

/// Converts a duration to an integer sample count. The duration must be a
/// whole number of sampling periods.
pub fn samples_from_seconds(seconds: f64, t_s: f64) -> Result<usize> {
    if !(t_s > 0.0) || !(seconds >= 0.0) {
        return Err(param_err!(
            "invalid duration {seconds} s at sampling period {t_s} s"
        ));
    }
    let n = seconds / t_s;
    let rounded = n.round();
    if (n - rounded).abs() > 1e-6 * rounded.max(1.0) {
        return Err(param_err!(
            "duration {seconds} s is not a whole number of {t_s} s samples"
        ));
    }
    Ok(rounded as usize)
}

/// Per-stage preamble, guard and payload lengths of one beamforming cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformConfig {
    pub zc: ZcParams,
    pub n_ph: usize,
    pub n_fb: usize,
    pub n_g1: usize,
    pub n_g2: usize,
    pub n_g3: usize,
    pub n_payload: usize,
    /// Sampling period in seconds.
    pub t_s: f64,
    /// Cycle period in seconds.
    pub t_cyc: f64,
}

impl WaveformConfig {
    /// The simulation row of the reference waveform table: `N_zc = 10`,
    /// `M = 63`, 100-sample phase and feedback preambles, 1 ms guards, a
    /// 12 ms payload and a 50 ms cycle at 1 MHz.
    pub fn reference_simulation() -> Self {
        Self {
            zc: ZcParams::new(1, 63, 10).expect("valid ZC parameters"),
            n_ph: 100,
            n_fb: 100,
            n_g1: 1000,
            n_g2: 1000,
            n_g3: 1000,
            n_payload: 12_000,
            t_s: 1e-6,
            t_cyc: 50e-3,
        }
    }

    /// Checks the invariants for a fleet of `n_radios`.
    pub fn validate(&self, n_radios: usize) -> Result<()> {
        if n_radios == 0 {
            return Err(param_err!("at least one radio is required"));
        }
        if self.n_ph == 0 || self.n_fb == 0 {
            return Err(param_err!("phase and feedback preambles must be non-empty"));
        }
        if self.n_payload == 0 {
            return Err(param_err!("payload must be non-empty"));
        }
        if !(self.t_s > 0.0) {
            return Err(param_err!("sampling period must be positive"));
        }
        let cycle = self.cycle_samples(n_radios) as f64 * self.t_s;
        if cycle > self.t_cyc * (1.0 + 1e-12) {
            return Err(Error::Config(alloc::format!(
                "cycle of {cycle} s for {n_radios} radios exceeds the {} s cycle period",
                self.t_cyc
            )));
        }
        Ok(())
    }

    /// Protocol overhead in samples,
    /// `N_syn + N·(N_ph + N_fb) + N_g1 + N_g2 + N_g3`.
    pub fn overhead_samples(&self, n_radios: usize) -> usize {
        overhead_samples(
            self.zc.sync_samples(),
            self.n_ph,
            self.n_fb,
            [self.n_g1, self.n_g2, self.n_g3],
            n_radios,
        )
    }

    /// Start of radio `slave` (1-based) phase slot.
    pub fn phase_slot_start(&self, slave: usize) -> usize {
        self.zc.sync_samples() + self.n_g1 + (slave - 1) * self.n_ph
    }

    pub fn feedback_start(&self, n_radios: usize) -> usize {
        self.zc.sync_samples() + self.n_g1 + n_radios * self.n_ph + self.n_g2
    }

    /// Length of the feedback burst, which carries a reference block plus one
    /// block per radio.
    pub fn feedback_samples(&self, n_radios: usize) -> usize {
        (n_radios + 1) * self.n_fb
    }

    pub fn payload_start(&self, n_radios: usize) -> usize {
        self.feedback_start(n_radios) + self.feedback_samples(n_radios) + self.n_g3
    }

    /// Samples from the start of synchronization to the end of the payload.
    pub fn cycle_samples(&self, n_radios: usize) -> usize {
        self.payload_start(n_radios) + self.n_payload
    }

    /// Sample position (possibly fractional) of the payload evaluation
    /// instant.
    pub fn evaluation_instant(&self, n_radios: usize, payload_fraction: f64) -> f64 {
        self.payload_start(n_radios) as f64 + payload_fraction * self.n_payload as f64
    }

    /// Midpoint of a radio's phase slot in samples.
    pub fn phase_slot_midpoint(&self, slave: usize) -> f64 {
        self.phase_slot_start(slave) as f64 + 0.5 * self.n_ph as f64
    }
}

/// Overhead from raw stage lengths.
pub fn overhead_samples(
    n_syn: usize,
    n_ph: usize,
    n_fb: usize,
    guards: [usize; 3],
    n_radios: usize,
) -> usize {
    n_syn + n_radios * (n_ph + n_fb) + guards.iter().sum::<usize>()
}

/// Time `t_e` in seconds from the midpoint of radio `slave`'s phase slot to
/// the evaluation instant `payload start + payload_fraction · t_p`.
pub fn evaluation_delay(
    cfg: &WaveformConfig,
    n_radios: usize,
    slave: usize,
    payload_fraction: f64,
) -> Result<f64> {
    if slave == 0 || slave > n_radios {
        return Err(param_err!("slave index {slave} outside 1..={n_radios}"));
    }
    if !(0.0..=1.0).contains(&payload_fraction) {
        return Err(param_err!(
            "payload fraction {payload_fraction} outside [0, 1]"
        ));
    }
    let eval = cfg.evaluation_instant(n_radios, payload_fraction);
    Ok((eval - cfg.phase_slot_midpoint(slave)) * cfg.t_s)
}

/// Payload fraction that places the evaluation instant `t_e` seconds after
/// the midpoint of radio `slave`'s phase slot.
pub fn payload_fraction_for_delay(
    cfg: &WaveformConfig,
    n_radios: usize,
    slave: usize,
    t_e: f64,
) -> Result<f64> {
    let at_start = evaluation_delay(cfg, n_radios, slave, 0.0)?;
    let frac = (t_e - at_start) / (cfg.n_payload as f64 * cfg.t_s);
    if !(0.0..=1.0).contains(&frac) {
        return Err(param_err!(
            "evaluation delay {t_e} s does not fall inside the payload"
        ));
    }
    Ok(frac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{decode_feedback, freq_estimate_oneshot};
    use crate::math::angle;
    use proptest::prelude::*;

    #[test]
    fn zc_reference_blocks_identical() {
        let zc = ZcParams::new(1, 63, 10).unwrap();
        let buf = make_zc_preamble(zc, 1e-6).unwrap();
        assert_eq!(buf.len(), 630);
        let s = buf.samples();
        for b in 1..10 {
            assert_eq!(&s[..63], &s[b * 63..(b + 1) * 63]);
        }
    }

    #[test]
    fn zc_constant_modulus() {
        let zc = ZcParams::new(1, 3, 2).unwrap();
        let buf = make_zc_preamble(zc, 1e-6).unwrap();
        assert_eq!(buf.len(), 6);
        for z in buf.samples() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zc_lag_autocorrelation_has_zero_phase() {
        let zc = ZcParams::new(5, 63, 4).unwrap();
        let buf = make_zc_preamble(zc, 1e-6).unwrap();
        let s = buf.samples();
        let eta: Complex64 = (0..3 * 63).map(|k| s[k].conj() * s[k + 63]).sum();
        assert!(angle(eta).abs() < 1e-12);
        assert_eq!(freq_estimate_oneshot(&buf, zc).unwrap(), 0.0);
    }

    #[test]
    fn zc_rejects_bad_parameters() {
        assert!(matches!(ZcParams::new(3, 63, 10), Err(Error::Param(_))));
        assert!(matches!(ZcParams::new(1, 63, 1), Err(Error::Param(_))));
        assert!(ZcParams::new(2, 63, 2).is_ok());
    }

    #[test]
    fn generated_preambles_have_unit_power() {
        let zc = make_zc_preamble(ZcParams::new(1, 63, 10).unwrap(), 1e-6).unwrap();
        assert!((zc.mean_power() - 1.0).abs() < 1e-9);
        let ph = make_phase_preamble(10_000, 3, 1e-6).unwrap();
        assert!((ph.mean_power() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn phase_preamble_is_seeded() {
        let a = make_phase_preamble(100, 7, 1e-6).unwrap();
        let b = make_phase_preamble(100, 7, 1e-6).unwrap();
        let c = make_phase_preamble(100, 8, 1e-6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(make_phase_preamble(0, 7, 1e-6).is_err());
    }

    #[test]
    fn phase_preamble_sample_power() {
        // The sample average of |x|² is the oracle here.
        let buf = make_phase_preamble(10_000, 42, 1e-6).unwrap();
        let p: f64 = buf
            .samples()
            .iter()
            .map(|z| z.re * z.re + z.im * z.im)
            .sum::<f64>()
            / buf.len() as f64;
        assert!((p - 1.0).abs() < 0.01);
    }

    #[test]
    fn feedback_burst_layout() {
        let pre = make_phase_preamble(16, 1, 1e-6).unwrap();
        let burst = make_feedback_burst(&pre, &[0.0]).unwrap();
        assert_eq!(burst.len(), 32);
        assert_eq!(&burst.samples()[..16], &burst.samples()[16..]);

        let burst = make_feedback_burst(&pre, &[PI / 2.0]).unwrap();
        let s = burst.samples();
        for k in 0..16 {
            let expected = s[k] * Complex64::new(0.0, 1.0);
            assert!((s[16 + k] - expected).norm() < 1e-12);
        }
        assert!(make_feedback_burst(&pre, &[]).is_err());
    }

    #[test]
    fn feedback_round_trip() {
        let pre = make_phase_preamble(100, 9, 1e-6).unwrap();
        let phases = [1.0, -2.5, 0.0, PI, 3.0];
        let burst = make_feedback_burst(&pre, &phases).unwrap();
        for (i, &phi) in phases.iter().enumerate() {
            let got = decode_feedback(&burst, i + 1, 100).unwrap();
            assert!((got - phi).abs() < 1e-9, "slave {} got {got}", i + 1);
        }
    }

    #[test]
    fn reference_overhead() {
        let cfg = WaveformConfig::reference_simulation();
        assert_eq!(cfg.overhead_samples(5), 4630);
        let tiny = WaveformConfig {
            zc: ZcParams::new(1, 1, 2).unwrap(),
            n_ph: 1,
            n_fb: 1,
            n_g1: 1,
            n_g2: 1,
            n_g3: 1,
            n_payload: 1,
            t_s: 1.0,
            t_cyc: 100.0,
        };
        assert_eq!(tiny.overhead_samples(1), 7);
    }

    #[test]
    fn overhead_is_affine_in_radios() {
        let cfg = WaveformConfig::reference_simulation();
        for n in 1..100 {
            assert_eq!(
                cfg.overhead_samples(n + 1) - cfg.overhead_samples(n),
                cfg.n_ph + cfg.n_fb
            );
        }
    }

    #[test]
    fn reference_evaluation_delay() {
        let cfg = WaveformConfig::reference_simulation();
        let frac = payload_fraction_for_delay(&cfg, 5, 1, 9e-3).unwrap();
        let t_e = evaluation_delay(&cfg, 5, 1, frac).unwrap();
        assert!((t_e - 9e-3).abs() < 1e-12);
        // Midpoint of the payload gives slightly more for the first slot.
        let mid = evaluation_delay(&cfg, 5, 1, 0.5).unwrap();
        assert!((mid - 9.05e-3).abs() < 1e-12);
    }

    #[test]
    fn evaluation_delay_without_guards() {
        let cfg = WaveformConfig {
            n_g1: 0,
            n_g2: 0,
            n_g3: 0,
            ..WaveformConfig::reference_simulation()
        };
        let n = 5;
        let t_e = evaluation_delay(&cfg, n, n, 0.0).unwrap();
        let expected = (cfg.n_fb * (n + 1)) as f64 * cfg.t_s + cfg.n_ph as f64 / 2.0 * cfg.t_s;
        assert!((t_e - expected).abs() < 1e-15);
        for i in 1..n {
            let a = evaluation_delay(&cfg, n, i, 0.3).unwrap();
            let b = evaluation_delay(&cfg, n, i + 1, 0.3).unwrap();
            assert!((a - b - cfg.n_ph as f64 * cfg.t_s).abs() < 1e-15);
        }
        assert!(evaluation_delay(&cfg, n, 0, 0.0).is_err());
        assert!(evaluation_delay(&cfg, n, n + 1, 0.0).is_err());
    }

    #[test]
    fn durations_must_be_whole_samples() {
        assert_eq!(samples_from_seconds(0.63e-3, 1e-6).unwrap(), 630);
        assert_eq!(samples_from_seconds(12e-3, 1e-6).unwrap(), 12_000);
        assert!(samples_from_seconds(1.5e-6, 1e-6).is_err());
    }

    #[test]
    fn cycle_must_fit_its_period() {
        let mut cfg = WaveformConfig::reference_simulation();
        assert!(cfg.validate(5).is_ok());
        cfg.t_cyc = 10e-3;
        assert!(matches!(cfg.validate(5), Err(Error::Config(_))));
    }

    proptest! {
        #[test]
        fn zc_periodicity(root in 1u32..40, m in 2usize..80, reps in 2usize..5) {
            prop_assume!(gcd(root as usize, m) == 1);
            let zc = ZcParams::new(root, m, reps).unwrap();
            let s = make_zc_preamble(zc, 1e-6).unwrap().into_samples();
            for k in 0..s.len() - m {
                prop_assert_eq!(s[k], s[k + m]);
            }
        }
    }
}
