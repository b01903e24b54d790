//! Deterministic seed derivation.
//!
//! Every randomized routine takes a 64-bit seed; nested work items (benchmark
//! replicates, CV folds, permutation shuffles) derive child seeds through
//! [`derive_seed`] so parallel execution order cannot change results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream for a seeded RNG. ChaCha is platform-independent, so identical
/// seeds give bit-identical draws everywhere.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 finalizer; full-period bijection on u64.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for the sub-stream identified by `tags` (replicate index,
/// method id, fold number, ...). Splittable: distinct tag paths give
/// independent-looking streams from one root seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix64(seed);
    for &t in tags {
        s = splitmix64(s ^ splitmix64(t.wrapping_add(0x632b_e593_86d1_b093)));
    }
    s
}

/// RNG for the sub-stream identified by `tags`.
pub fn derive_rng(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    rng_from_seed(derive_seed(seed, tags))
}
