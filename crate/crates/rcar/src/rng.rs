//! Deterministic stream derivation for parallel Monte Carlo.
//!
//! Every random quantity in the crate is drawn from a ChaCha12 stream
//! whose 64-bit seed is derived from a base seed and one or more counters
//! through the splitmix64 finalizer. Streams derived from distinct
//! counters are statistically independent for practical purposes, and the
//! derivation is pure, so results never depend on scheduling or worker
//! count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Weyl increment used to space counters apart (the golden-ratio constant
/// from splitmix64).
const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer: a high-quality 64-bit mixing bijection.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a counter.
///
/// Equivalent to taking the `counter`-th output of a splitmix64 generator
/// seeded at `base`, so distinct counters give well-separated seeds.
pub fn counter_seed(base: u64, counter: u64) -> u64 {
    mix64(base.wrapping_add(counter.wrapping_mul(GOLDEN_GAMMA)).wrapping_add(GOLDEN_GAMMA))
}

/// Opens the ChaCha12 stream identified by `(base, counter)`.
pub fn stream(base: u64, counter: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(counter_seed(base, counter))
}
