//! Deterministic seed derivation for reproducible sampling.
//!
//! Every randomized routine takes an explicit `u64` seed and derives
//! sub-seeds with splitmix64, so a run is reproducible regardless of
//! thread count or iteration order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 step: mixes a counter into a well-distributed 64-bit value.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Sub-seed for the `index`-th independent stream of a run.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base.wrapping_add(splitmix64(index)))
}

/// Stream cipher generator for the given derived seed.
pub fn rng_for(base: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, index))
}
