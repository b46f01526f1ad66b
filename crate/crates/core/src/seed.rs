//! Seed derivation. Every random stream in the crate is keyed by a tuple of
//! integers folded into one 64-bit seed, so work can be split across threads
//! without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags keep streams for different purposes disjoint.
pub(crate) const EXPERT_STREAM: u64 = 0x4558_5045_5254; // "EXPERT"
pub(crate) const NETWORK_STREAM: u64 = 0x4e45_5457_4f52_4b; // "NETWORK"
pub(crate) const TRIAL_STREAM: u64 = 0x5452_4941_4c; // "TRIAL"

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive hash of `parts`.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243f_6a88_85a3_08d3, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(parts: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(parts))
}
