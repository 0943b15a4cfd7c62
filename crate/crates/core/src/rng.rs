//! Reproducible random streams.
//!
//! Every stochastic job (a trial, a p-grid point, a network instance) gets its
//! own generator whose seed is derived from the run seed and a path of integer
//! tags. Derivation is a chain of SplitMix64 finalizers, so streams do not
//! depend on scheduling order and parallel runs match serial ones bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Tags separating the purposes a run seed is split into.
pub mod tag {
    pub const TRIAL: u64 = 1;
    pub const INSTANCE: u64 = 2;
    pub const POINT: u64 = 3;
    pub const RANDOM_SEEDS: u64 = 4;
    pub const HILL_CLIMB: u64 = 5;
    pub const LOCAL: u64 = 6;
    pub const EVALUATION: u64 = 7;
    pub const NOISE: u64 = 8;
    pub const ROUND: u64 = 9;
    pub const SUBNETWORK: u64 = 10;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and a sequence of tags.
pub fn derive(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn rng_from_seed(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for trial `index` of a job seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> StreamRng {
    rng_from_seed(derive(seed, &[tag::TRIAL, index]))
}
