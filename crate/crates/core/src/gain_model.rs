//! Beamforming gain from phase errors and its analytical distribution.
//!
//! With i.i.d. zero-mean Gaussian phase errors of variance `σ²_e`, the gain
//! `G` has closed-form mean and variance, and `N - G` is well approximated by
//! a Gamma variable matched to those moments.

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed when a dependency links std
use num_traits::Float;

use crate::error::{param_err, Result};
use crate::special::{gamma_cdf, normal_cdf};

/// `(1/N)·|Σ e^{jφ_n}|²`.
pub fn gain_from_phases(phase_errors: &[f64]) -> Result<f64> {
    if phase_errors.is_empty() {
        return Err(param_err!("gain needs at least one phase error"));
    }
    let sum: Complex64 = phase_errors
        .iter()
        .map(|&p| Complex64::from_polar(1.0, p))
        .sum();
    Ok(sum.norm_sqr() / phase_errors.len() as f64)
}

/// `|Σ a_n e^{jφ_n}|² / Σ a_n²`.
pub fn gain_from_phases_weighted(phase_errors: &[f64], amplitudes: &[f64]) -> Result<f64> {
    if phase_errors.len() != amplitudes.len() {
        return Err(param_err!(
            "{} phases but {} amplitudes",
            phase_errors.len(),
            amplitudes.len()
        ));
    }
    if phase_errors.is_empty() {
        return Err(param_err!("gain needs at least one phase error"));
    }
    if amplitudes.iter().any(|&a| !(a > 0.0)) {
        return Err(param_err!("amplitudes must be positive"));
    }
    let sum: Complex64 = phase_errors
        .iter()
        .zip(amplitudes)
        .map(|(&p, &a)| Complex64::from_polar(a, p))
        .sum();
    let energy: f64 = amplitudes.iter().map(|a| a * a).sum();
    Ok(sum.norm_sqr() / energy)
}

/// `E[G] = 1 + (N-1)e^{-σ²_e}`.
pub fn gain_mean(n: usize, var_e: f64) -> f64 {
    1.0 + (n as f64 - 1.0) * (-var_e).exp()
}

/// `var[G] = ((N-1)/N)(1-e^{-σ²})²((1-e^{-σ²})² + 2N e^{-σ²})`.
pub fn gain_variance(n: usize, var_e: f64) -> f64 {
    let nf = n as f64;
    let e = (-var_e).exp();
    let d = -(-var_e).exp_m1();
    (nf - 1.0) / nf * d * d * (d * d + 2.0 * nf * e)
}

/// Mean and variance of the gain for `n` radios at phase error `var_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainStats {
    pub n: usize,
    pub var_e: f64,
    pub mean: f64,
    pub variance: f64,
}

impl GainStats {
    pub fn new(n: usize, var_e: f64) -> Self {
        Self {
            n,
            var_e,
            mean: gain_mean(n, var_e),
            variance: gain_variance(n, var_e),
        }
    }
}

/// Approximate law of the gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainDistribution {
    /// `G = n - X` with `X ~ Γ(k_shape, theta)`.
    Gamma { n: usize, k_shape: f64, theta: f64 },
    /// Normal law with the exact moments.
    Gaussian { n: usize, mean: f64, std_dev: f64 },
    /// All mass at one value.
    PointMass { value: f64 },
}

impl GainDistribution {
    /// `P(G ≤ g)`.
    pub fn cdf(&self, g: f64) -> f64 {
        match *self {
            Self::Gamma { n, k_shape, theta } => 1.0 - gamma_cdf(n as f64 - g, k_shape, theta),
            Self::Gaussian { mean, std_dev, .. } => normal_cdf((g - mean) / std_dev),
            Self::PointMass { value } => {
                if g >= value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `P(G < g)`; differs from [`Self::cdf`] only at a point mass.
    pub fn cdf_below(&self, g: f64) -> f64 {
        match *self {
            Self::PointMass { value } => {
                if g > value {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.cdf(g),
        }
    }

    /// Probability the approximation places outside the support `[0, n]`.
    pub fn mass_outside_support(&self) -> f64 {
        match *self {
            Self::Gamma { n, k_shape, theta } => 1.0 - gamma_cdf(n as f64, k_shape, theta),
            Self::Gaussian { n, mean, std_dev } => {
                normal_cdf(-mean / std_dev) + 1.0 - normal_cdf((n as f64 - mean) / std_dev)
            }
            Self::PointMass { .. } => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Gamma { n, k_shape, theta } => n as f64 - k_shape * theta,
            Self::Gaussian { mean, .. } => mean,
            Self::PointMass { value } => value,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Gamma { k_shape, theta, .. } => k_shape * theta * theta,
            Self::Gaussian { std_dev, .. } => std_dev * std_dev,
            Self::PointMass { .. } => 0.0,
        }
    }
}

fn check_inputs(n: usize, var_e: f64) -> Result<()> {
    if n == 0 {
        return Err(param_err!("at least one radio is required"));
    }
    if !(var_e >= 0.0) {
        return Err(param_err!(
            "phase error variance must be non-negative, got {var_e}"
        ));
    }
    Ok(())
}

fn degenerate(n: usize, var_e: f64) -> Option<GainDistribution> {
    if n == 1 {
        Some(GainDistribution::PointMass { value: 1.0 })
    } else if var_e == 0.0 {
        Some(GainDistribution::PointMass { value: n as f64 })
    } else {
        None
    }
}

/// Moment-matched Gamma law for `N - G`:
/// `K = N(N-1)/((1-e)² + 2Ne)`, `θ = (1-e)((1-e)² + 2Ne)/N` with
/// `e = e^{-σ²_e}`.
pub fn gamma_approximation(n: usize, var_e: f64) -> Result<GainDistribution> {
    check_inputs(n, var_e)?;
    if let Some(d) = degenerate(n, var_e) {
        return Ok(d);
    }
    let nf = n as f64;
    let e = (-var_e).exp();
    let d = -(-var_e).exp_m1();
    let spread = d * d + 2.0 * nf * e;
    Ok(GainDistribution::Gamma {
        n,
        k_shape: nf * (nf - 1.0) / spread,
        theta: d * spread / nf,
    })
}

pub fn gaussian_approximation(n: usize, var_e: f64) -> Result<GainDistribution> {
    check_inputs(n, var_e)?;
    if let Some(d) = degenerate(n, var_e) {
        return Ok(d);
    }
    Ok(GainDistribution::Gaussian {
        n,
        mean: gain_mean(n, var_e),
        std_dev: gain_variance(n, var_e).sqrt(),
    })
}

/// `N·γ_pre·G`.
pub fn post_bf_snr(gamma_pre: f64, n: usize, gain: f64) -> f64 {
    n as f64 * gamma_pre * gain
}

/// Result of testing a configuration against an outage requirement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageCheck {
    pub satisfied: bool,
    /// Predicted `P(γ_post < γ_min)`.
    pub outage: f64,
    /// `p_out - outage`; non-negative when satisfied.
    pub margin: f64,
}

/// Predicted outage `P(N·γ_pre·G < γ_min)` under the Gamma approximation.
pub fn outage_probability(n: usize, var_e: f64, gamma_pre: f64, gamma_min: f64) -> Result<f64> {
    if !(gamma_pre > 0.0) || !(gamma_min > 0.0) {
        return Err(param_err!("SNRs must be positive"));
    }
    let dist = gamma_approximation(n, var_e)?;
    // A non-positive Gamma argument yields outage 1, which also covers the
    // support bound N²γ_pre < γ_min.
    Ok(dist.cdf_below(gamma_min / (gamma_pre * n as f64)))
}

/// Tests `F_X(N - γ_min/(γ_pre·N)) ≥ 1 - p_out`, i.e. outage at most
/// `p_out`.
pub fn outage_satisfied(
    n: usize,
    var_e: f64,
    gamma_pre: f64,
    gamma_min: f64,
    p_out: f64,
) -> Result<OutageCheck> {
    if !(p_out > 0.0 && p_out < 1.0) {
        return Err(param_err!(
            "outage probability must be in (0, 1), got {p_out}"
        ));
    }
    let outage = outage_probability(n, var_e, gamma_pre, gamma_min)?;
    Ok(OutageCheck {
        satisfied: outage <= p_out,
        outage,
        margin: p_out - outage,
    })
}
