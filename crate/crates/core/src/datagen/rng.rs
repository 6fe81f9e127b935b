//! The single random source for everything seeded in this crate.
//!
//! Xoshiro256++ seeded through SplitMix64 (`seed_from_u64`). Both algorithms
//! are fully specified, so fixtures can be regenerated from the seed in any
//! language.

use rand::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus as Rng64;

pub fn seeded(seed: u64) -> Rng64 {
    Rng64::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`, for restarts and probes
/// that may be evaluated in any order.
pub fn substream(seed: u64, index: u64) -> Rng64 {
    let mut rng = seeded(seed);
    for _ in 0..index {
        rng.jump();
    }
    rng
}
