//! Seed derivation for the independent random streams of a run.
//!
//! Every stream (one per fault spec, one per agent/tick threshold sample
//! draw) gets its own ChaCha8 generator whose seed is a stable hash of the
//! scenario master seed and a small tuple of identifiers. Editing one part
//! of a scenario therefore never shifts the draws of an unrelated stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream tags keep seeds of different purposes apart.
pub const TAG_FAULT: u64 = 0x0066_6175_6c74;
pub const TAG_THRESHOLD: u64 = 0x7468_7265_7368;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    words.iter().fold(splitmix64(master), |acc, &w| {
        splitmix64(acc ^ splitmix64(w))
    })
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
