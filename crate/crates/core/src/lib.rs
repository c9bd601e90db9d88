//! Sample-level simulation and analysis of destination-led distributed
//! transmit beamforming.
//!
//! A destination radio (the master) sends a repeated Zadoff-Chu preamble
//! for frequency synchronization, each beamforming radio (a slave) answers
//! in its own slot with a phase-estimation preamble, and the master returns
//! the estimated phases in-band. The slaves then correct their carriers and
//! transmit a common payload that combines coherently at the destination.
//!
//! The crate covers:
//!
//! - [`waveform`]: preamble generation and protocol timing.
//! - [`channel`]: narrowband flat links, Wiener frequency drift, AWGN and
//!   link budgets.
//! - [`estimators`]: frequency, Kalman, phase and feedback estimators with
//!   their closed-form error variances.
//! - [`gain_model`]: beamforming-gain moments and distribution
//!   approximations, post-beamforming SNR and the outage test.
//! - [`protocol_sim`]: Monte Carlo simulation of full beamforming cycles and
//!   emulation over recorded channel traces.
//! - [`designer`]: preamble-length optimization under overhead or variance
//!   budgets and the minimum fleet-size search.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `dtbf` crate.

#![no_std]
// `!(x > 0.0)` guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod designer;
mod error;
pub mod estimators;
pub mod gain_model;
pub mod math;
pub mod protocol_sim;
pub mod rng;
pub mod special;
pub mod waveform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
