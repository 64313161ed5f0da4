//! Deterministic seed derivation and the counter-based RNG used everywhere.
//!
//! All randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`). A stream is
//! identified by `(seed, stream)`; sub-seeds are derived with the SplitMix64 finaliser.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a path of identifiers (node id, round, ...).
pub fn derive(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of generator `seed`; used for per-sample draws so
/// parallel generation reproduces the serial output.
pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
