#[allow(unused_imports)] // shadowed when a dependency links std
use num_traits::Float;

use crate::error::{param_err, Result};

/// Scalar random-walk Kalman filter state for one radio's frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanState {
    /// Current estimate `x_{k|k}` in Hz.
    pub x: f64,
    /// Error variance `p_{k|k}` in Hz².
    pub p: f64,
    /// Process noise variance per step.
    pub q: f64,
    /// Measurement noise variance.
    pub r: f64,
}

impl KalmanState {
    pub fn new(x: f64, p: f64, q: f64, r: f64) -> Result<Self> {
        if !(p >= 0.0) || !(q >= 0.0) || !(r > 0.0) {
            return Err(param_err!(
                "Kalman variances must satisfy p >= 0, q >= 0, r > 0"
            ));
        }
        Ok(Self { x, p, q, r })
    }

    /// Starts the filter at its first measurement with `p = r`.
    pub fn from_first_measurement(z: f64, q: f64, r: f64) -> Result<Self> {
        Self::new(z, r, q, r)
    }

    /// Kalman gain the next update would use.
    pub fn next_gain(&self) -> f64 {
        let prior = self.p + self.q;
        prior / (prior + self.r)
    }
}

/// One predict-then-update step with measurement `z`.
///
/// The new estimate is the weighted average
/// `r/(p'+r)·x + p'/(p'+r)·z` with `p' = p + q`.
pub fn kf_update(state: KalmanState, z: f64) -> KalmanState {
    let prior = state.p + state.q;
    let gain = prior / (prior + state.r);
    KalmanState {
        x: state.x + gain * (z - state.x),
        p: (1.0 - gain) * prior,
        ..state
    }
}

/// Steady-state error variance `(-q + q·sqrt(1 + 4r/q)) / 2` of the filter,
/// evaluated as `2qr / (q + sqrt(q² + 4qr))` to avoid cancellation.
pub fn kf_steady_state_variance(q: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(param_err!("measurement variance must be positive"));
    }
    if !(q >= 0.0) {
        return Err(param_err!("process variance must be non-negative"));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * q * r / (q + (q * q + 4.0 * q * r).sqrt()))
}
