//! TOML scenario configuration.
//!
//! SNRs are given in dB and converted to linear on use. Each command reads
//! its own section; `[waveform]` and `[channel]` are shared.

use dtbf_core::channel::{DriftModel, LinkBudgetParams};
use dtbf_core::estimators::FreqMode;
use dtbf_core::waveform::{WaveformConfig, ZcParams};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    #[serde(default)]
    pub waveform: WaveformSection,
    #[serde(default)]
    pub channel: ChannelSection,
    pub analyze: Option<AnalyzeSection>,
    pub simulate: Option<SimulateSection>,
    pub design: Option<DesignSection>,
    pub emulate: Option<EmulateSection>,
}

/// Protocol layout. Defaults are the reference simulation waveform.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveformSection {
    pub zc_root: u32,
    pub zc_length: usize,
    pub zc_repetitions: usize,
    pub n_ph: usize,
    pub n_fb: usize,
    /// Guard samples after sync, after the phase slots and after feedback.
    pub guard_samples: [usize; 3],
    pub n_payload: usize,
    pub sample_rate_hz: f64,
    pub cycle_ms: f64,
}

impl Default for WaveformSection {
    fn default() -> Self {
        let w = WaveformConfig::reference_simulation();
        Self {
            zc_root: w.zc.root(),
            zc_length: w.zc.length(),
            zc_repetitions: w.zc.repetitions(),
            n_ph: w.n_ph,
            n_fb: w.n_fb,
            guard_samples: [w.n_g1, w.n_g2, w.n_g3],
            n_payload: w.n_payload,
            sample_rate_hz: 1.0 / w.t_s,
            cycle_ms: w.t_cyc * 1e3,
        }
    }
}

impl WaveformSection {
    pub fn t_s(&self) -> Result<f64, CliError> {
        if self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite() {
            Ok(1.0 / self.sample_rate_hz)
        } else {
            Err(CliError::field(
                "waveform.sample_rate_hz",
                "must be positive",
            ))
        }
    }

    pub fn t_cyc(&self) -> Result<f64, CliError> {
        if self.cycle_ms > 0.0 && self.cycle_ms.is_finite() {
            Ok(self.cycle_ms * 1e-3)
        } else {
            Err(CliError::field("waveform.cycle_ms", "must be positive"))
        }
    }

    pub fn to_core(&self) -> Result<WaveformConfig, CliError> {
        let zc = ZcParams::new(self.zc_root, self.zc_length, self.zc_repetitions)
            .map_err(|e| CliError::field("waveform.zc_*", e))?;
        let [n_g1, n_g2, n_g3] = self.guard_samples;
        Ok(WaveformConfig {
            zc,
            n_ph: self.n_ph,
            n_fb: self.n_fb,
            n_g1,
            n_g2,
            n_g3,
            n_payload: self.n_payload,
            t_s: self.t_s()?,
            t_cyc: self.t_cyc()?,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    /// Wiener drift variance per cycle, Hz².
    pub drift_q: f64,
    pub initial_freq_hz: f64,
    pub link: Option<LinkSection>,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            drift_q: 0.0,
            initial_freq_hz: dtbf_core::protocol_sim::DEFAULT_INITIAL_FREQ_HZ,
            link: None,
        }
    }
}

impl ChannelSection {
    pub fn drift(&self, t_cyc: f64) -> Result<DriftModel, CliError> {
        DriftModel::new(self.drift_q, t_cyc).map_err(|e| CliError::field("channel.drift_q", e))
    }

    pub fn link_params(&self) -> Result<LinkBudgetParams, CliError> {
        self.link
            .as_ref()
            .ok_or_else(|| CliError::field("channel.link", "section required by this command"))?
            .to_core()
    }
}

/// Log-distance link budget. The free-space reference distance is either
/// given directly or solved from an SNR anchor.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub tx_power_dbm: f64,
    pub dest_power_dbm: f64,
    pub pathloss_exp: f64,
    #[serde(default = "default_noise_figure")]
    pub noise_figure_db: f64,
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: f64,
    #[serde(default = "default_carrier")]
    pub carrier_hz: f64,
    pub ref_distance_m: Option<f64>,
    pub anchor_snr_db: Option<f64>,
    pub anchor_distance_m: Option<f64>,
}

fn default_noise_figure() -> f64 {
    3.0
}

fn default_bandwidth() -> f64 {
    1e6
}

fn default_carrier() -> f64 {
    915e6
}

impl LinkSection {
    pub fn to_core(&self) -> Result<LinkBudgetParams, CliError> {
        let mut p = LinkBudgetParams {
            tx_power_dbm: self.tx_power_dbm,
            dest_power_dbm: self.dest_power_dbm,
            pathloss_exp: self.pathloss_exp,
            noise_figure_db: self.noise_figure_db,
            bandwidth_hz: self.bandwidth_hz,
            carrier_hz: self.carrier_hz,
            ref_distance: self.ref_distance_m.unwrap_or(1.0),
        };
        match (
            self.anchor_snr_db,
            self.anchor_distance_m,
            self.ref_distance_m,
        ) {
            (None, None, _) => {}
            (Some(snr), Some(d), None) => {
                p.ref_distance = p
                    .ref_distance_for_anchor(snr, d)
                    .map_err(|e| CliError::field("channel.link.anchor_snr_db", e))?;
            }
            (Some(_), Some(_), Some(_)) => {
                return Err(CliError::field(
                    "channel.link.ref_distance_m",
                    "conflicts with the SNR anchor",
                ))
            }
            _ => {
                return Err(CliError::field(
                    "channel.link",
                    "anchor_snr_db and anchor_distance_m must be given together",
                ))
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Oneshot,
    Kalman,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Oneshot => "oneshot",
            Self::Kalman => "kalman",
        }
    }
}

impl From<Mode> for FreqMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Oneshot => FreqMode::Oneshot,
            Mode::Kalman => FreqMode::Kalman,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSection {
    pub radios: Vec<usize>,
    pub sigma_e: Vec<f64>,
    #[serde(default = "default_cdf_points")]
    pub cdf_points: usize,
}

fn default_cdf_points() -> usize {
    21
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::Oneshot, Mode::Kalman]
}

fn default_fraction() -> f64 {
    0.5
}

fn default_burn_in() -> usize {
    dtbf_core::protocol_sim::DEFAULT_BURN_IN_CYCLES
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub radios: usize,
    pub snr_db: Vec<f64>,
    /// Destination-to-radio SNR relative to the pre-beamforming SNR, dB.
    #[serde(default)]
    pub dr_offset_db: f64,
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
    pub cycles: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in_cycles: usize,
    #[serde(default = "default_fraction")]
    pub payload_fraction: f64,
    pub gamma_min_db: Option<f64>,
    /// Also write the per-cycle gains of every point.
    #[serde(default)]
    pub dump_cycles: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Smallest fleet meeting the outage target under an overhead budget.
    MinRadios,
    /// Smallest overhead meeting the outage target with a fixed fleet.
    MinOverhead,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Self::MinRadios => "min_radios",
            Self::MinOverhead => "min_overhead",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub objective: Objective,
    pub distances_m: Vec<f64>,
    pub gamma_min_db: f64,
    pub p_out: f64,
    /// Fleet size for `min_overhead`.
    pub radios: Option<usize>,
    #[serde(default = "default_radios_min")]
    pub radios_min: usize,
    #[serde(default = "default_radios_max")]
    pub radios_max: usize,
    /// Overhead budget in samples for `min_radios`.
    pub overhead_budget: Option<usize>,
    /// Hard cap on the overhead, samples.
    pub max_overhead: usize,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_fraction")]
    pub payload_fraction: f64,
    /// Fixed evaluation delay; when absent it follows the payload position.
    pub evaluation_delay_ms: Option<f64>,
    /// Cycles simulated per feasible design to measure its outage; 0 skips.
    #[serde(default)]
    pub validate_cycles: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in_cycles: usize,
}

fn default_radios_min() -> usize {
    1
}

fn default_radios_max() -> usize {
    100
}

fn default_mode() -> Mode {
    Mode::Oneshot
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmulateSection {
    #[serde(default = "default_emulate_radios")]
    pub radios: usize,
    /// Cycles to replay; defaults to as many as the trace holds.
    pub cycles: Option<usize>,
    pub added_noise_snr_db: Option<f64>,
    #[serde(default = "default_fraction")]
    pub payload_fraction: f64,
}

fn default_emulate_radios() -> usize {
    2
}

/// Parses config text. Errors carry the TOML line and column or the
/// offending field.
pub fn parse(text: &str) -> Result<Config, CliError> {
    toml::from_str(text).map_err(|e| CliError::Input(format!("config error: {e}")))
}

/// SHA-256 of the config's canonical JSON form, with table keys sorted, so
/// reordering keys or reformatting leaves it unchanged.
pub fn digest(text: &str) -> Result<String, CliError> {
    let value: toml::Value =
        toml::from_str(text).map_err(|e| CliError::Input(format!("config error: {e}")))?;
    let json = serde_json::to_value(value).map_err(|e| CliError::Input(e.to_string()))?;
    let bytes = serde_json::to_vec(&json).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub(crate) fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    section
        .as_ref()
        .ok_or_else(|| CliError::field(name, "section missing from config"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_reference_waveform() {
        let c = parse("").unwrap();
        assert_eq!(
            c.waveform.to_core().unwrap(),
            WaveformConfig::reference_simulation()
        );
        assert!(c.simulate.is_none());
    }

    #[test]
    fn digest_ignores_key_order_and_formatting() {
        let a = "seed = 3\n[waveform]\nn_ph = 50\nn_fb = 40\n";
        let b = "seed=3\n\n[waveform]\nn_fb   = 40 # comment\nn_ph = 50\n";
        assert_eq!(digest(a).unwrap(), digest(b).unwrap());
        assert_ne!(
            digest(a).unwrap(),
            digest("seed = 4\n[waveform]\nn_ph = 50\nn_fb = 40\n").unwrap()
        );
    }

    #[test]
    fn errors_report_line_and_field() {
        let err = parse("seed = 1\n[waveform]\nn_ph = \"ten\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("n_ph"), "{err}");
        let err = parse("[waveform]\nnph = 3\n").unwrap_err().to_string();
        assert!(err.contains("nph"), "{err}");
    }

    #[test]
    fn link_anchor_solves_reference_distance() {
        let c = parse(
            "[channel.link]\ntx_power_dbm = 0.0\ndest_power_dbm = 20.0\npathloss_exp = 3.7\n\
             anchor_snr_db = -13.0\nanchor_distance_m = 1000.0\n",
        )
        .unwrap();
        let p = c.channel.link_params().unwrap();
        let snr = dtbf_core::channel::link_budget(1000.0, &p).unwrap();
        assert!((dtbf_core::math::linear_to_db(snr.gamma_pre) + 13.0).abs() < 1e-9);
    }

    #[test]
    fn half_anchor_is_rejected() {
        let c = parse(
            "[channel.link]\ntx_power_dbm = 0.0\ndest_power_dbm = 20.0\npathloss_exp = 3.7\n\
             anchor_snr_db = -13.0\n",
        )
        .unwrap();
        assert!(c.channel.link_params().is_err());
    }
}
