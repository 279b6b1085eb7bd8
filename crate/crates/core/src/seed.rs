//! Deterministic seed derivation and light hashing.
//!
//! All randomness in the crate flows from a single master seed. Sub-seeds for
//! replicates, EM iterations, and test arms derive from the master seed and a
//! list of integer labels, never from scheduling order, so results are
//! reproducible at any parallelism degree.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and an ordered list of labels.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    let mut state = mix(master ^ GOLDEN);
    for &label in labels {
        state = mix(state.wrapping_add(GOLDEN) ^ label);
    }
    mix(state)
}

/// Seeded generator for a derived seed.
pub fn derive_rng(master: u64, labels: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, labels))
}

/// FNV-1a over a byte slice; used to fingerprint datasets.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}
