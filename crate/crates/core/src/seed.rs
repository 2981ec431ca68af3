//! Deterministic seed derivation.
//!
//! Campaigns fan a single master seed out into independent per-trial
//! streams, and trials fan their seed out again (topology, auxiliary
//! draws). Derivation is counter-based — child seeds depend only on
//! `(parent, stream)`, never on evaluation order — which is what makes
//! parallel and sequential campaign runs byte-identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; full-avalanche mixing of one word.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of child stream `stream` from `parent`.
///
/// Distinct `(parent, stream)` pairs map to decorrelated seeds; the map is
/// pure, so any subset of streams can be reproduced in isolation.
pub fn derive_seed(parent: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(parent ^ 0x6A09_E667_F3BC_C909).wrapping_add(splitmix64(stream)))
}

/// The crate's RNG, seeded from a derived seed.
///
/// ChaCha8 is used everywhere: fast, portable, and its stream for a given
/// seed is stable across platforms and rustc versions.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn derivation_is_pure() {
        assert_eq!(derive_seed(42, 7), derive_seed(42, 7));
        assert_ne!(derive_seed(42, 7), derive_seed(42, 8));
        assert_ne!(derive_seed(42, 7), derive_seed(43, 7));
    }

    #[test]
    fn no_collisions_over_a_dense_grid() {
        let mut seen = HashSet::new();
        for parent in 0..64u64 {
            for stream in 0..1024u64 {
                assert!(seen.insert(derive_seed(parent, stream)));
            }
        }
    }

    #[test]
    fn child_differs_from_parent() {
        for parent in [0u64, 1, 42, u64::MAX] {
            assert_ne!(derive_seed(parent, 0), parent);
        }
    }

    #[test]
    fn rng_streams_are_reproducible() {
        use rand::Rng;
        let mut a = rng_from_seed(derive_seed(9, 3));
        let mut b = rng_from_seed(derive_seed(9, 3));
        for _ in 0..32 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }
}
