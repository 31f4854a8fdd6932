//! Seeded random streams.
//!
//! Every replica draws from its own ChaCha8 stream selected by
//! `(master seed, stream index)`, so results never depend on how work is
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream offsets keep the different consumers of one master seed apart.
pub const GRAPH_STREAM_BASE: u64 = 1 << 62;
pub const REPLICA_STREAM_BASE: u64 = 0;

/// Random source for stream `index` of `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Random source for replica `index`.
pub fn replica(master_seed: u64, index: u64) -> StreamRng {
    stream(master_seed, REPLICA_STREAM_BASE + index)
}

/// Random source for the `index`-th graph drawn from `master_seed`.
pub fn graph(master_seed: u64, index: u64) -> StreamRng {
    stream(master_seed, GRAPH_STREAM_BASE + index)
}
