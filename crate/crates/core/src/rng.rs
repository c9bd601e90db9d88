//! Counter-based random streams.
//!
//! Every random draw in a simulation comes from a ChaCha stream selected by
//! `(seed, stream id)`, so results do not depend on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream ids reserved for non-cycle draws.
pub(crate) const INIT_STREAM: u64 = u64::MAX;
pub(crate) const TRACE_NOISE_STREAM: u64 = u64::MAX - 1;

/// Stream carrying the per-cycle frequency drift increments.
pub fn drift_stream(seed: u64, cycle: u64) -> SimRng {
    stream(seed, 2 * cycle)
}

/// Stream carrying all other per-cycle draws (phases and noise).
pub fn cycle_stream(seed: u64, cycle: u64) -> SimRng {
    stream(seed, 2 * cycle + 1)
}

pub fn stream(seed: u64, id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
