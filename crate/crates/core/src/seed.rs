//! Seed derivation.
//!
//! Every random component (a reservoir run, a sketch, a trial) gets its own
//! generator seeded from a parent seed and an index. The mixing function is
//! SplitMix64 applied twice:
//!
//! `derive(parent, index) = splitmix64(parent ^ splitmix64(index + 0x9E3779B97F4A7C15))`
//!
//! so a trial can be reproduced from `(master seed, trial index)` alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for component `index` under `parent`.
pub fn derive(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index.wrapping_add(GOLDEN_GAMMA)))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
