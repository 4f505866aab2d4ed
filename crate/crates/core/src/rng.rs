//! Reproducible random streams.
//!
//! A run is identified by a 64-bit master seed and a run index. Each
//! `(run, purpose)` pair gets its own ChaCha8 stream: the generator is keyed
//! by the master seed and its stream id is `(run << 8) | purpose`. Streams
//! never overlap, so results do not depend on the order in which runs execute.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// What a random stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Purpose {
    /// Bernoulli rewards of the environment.
    Rewards = 1,
    /// Per-run instance draws (e.g. random delays).
    Instance = 2,
    /// Samples drawn by the arm-ordering procedure.
    Ranking = 3,
    /// Random instance generation in searches and tests.
    Search = 4,
}

pub type StreamRng = ChaCha8Rng;

/// Substream for `(run, purpose)` under `master`.
pub fn stream(master: u64, run: u64, purpose: Purpose) -> StreamRng {
    assert!(run < (1 << 56), "run index must fit in 56 bits");
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream((run << 8) | purpose as u64);
    rng
}
