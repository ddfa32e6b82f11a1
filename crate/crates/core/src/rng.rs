//! Reproducible random streams.
//!
//! Every chain draws from a ChaCha8 keystream keyed by a 64-bit seed and
//! selected by a 64-bit stream id. Replica `k` of an experiment uses stream
//! `base + k`, so replicas are independent and can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Seed used when neither the config nor the command line supplies one.
pub const DEFAULT_SEED: u64 = 0x5EED_E76D;

pub fn stream(seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}
