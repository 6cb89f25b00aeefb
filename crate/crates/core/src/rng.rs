//! Seeded random streams and deterministic seed derivation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The only entropy source used by samplers, policies and the simulator.
///
/// ChaCha8 output is platform independent, so traces reproduce bit-for-bit.
pub type RandomStream = ChaCha8Rng;

pub fn stream_from_seed(seed: u64) -> RandomStream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and an ordered list of indices.
///
/// Each index is folded in through a full avalanche round, so `(1, 2)` and
/// `(2, 1)` give unrelated seeds and no two paths share a stream by accident.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &idx| splitmix64(acc ^ splitmix64(idx.wrapping_add(1))))
}
