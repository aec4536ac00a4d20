//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha::ChaCha8Rng`),
//! a counter-based generator. The 256-bit key is expanded from the 64-bit
//! user seed with `SeedableRng::seed_from_u64`; independent substreams use the
//! 64-bit ChaCha stream id `(n << 32) | replication`. Streams for distinct
//! `(n, replication)` pairs therefore never overlap, and a replication's draws
//! do not depend on which thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for replication `rep` of the experiment cell with sample size `n`.
pub fn substream(seed: u64, n: usize, rep: usize) -> SimRng {
    assert!(n < (1 << 32) && rep < (1 << 32), "substream index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | rep as u64);
    rng
}

/// Root stream for one-off draws.
pub fn root(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
