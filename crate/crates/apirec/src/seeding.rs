//! Deterministic RNG derivation.
//!
//! Every randomized component draws from a ChaCha stream keyed by
//! (user seed, stream tag, item index), so individual items are reproducible
//! in isolation and independent of execution order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const STREAM_SAMPLER: u64 = 1;
pub(crate) const STREAM_CORPUS: u64 = 2;
pub(crate) const STREAM_EVAL_APPS: u64 = 3;
pub(crate) const STREAM_VERIFY: u64 = 4;

pub(crate) fn stream_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive combination of seed components into one derived seed.
pub(crate) fn mix_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5be5_a572_c59a_f1d1, |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}
