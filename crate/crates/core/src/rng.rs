//! Seed derivation for reproducible, order-independent sampling.
//!
//! Std's `DefaultHasher` is not stable across releases, so seed material is
//! mixed with fixed constants (FNV-1a and splitmix64). Every random stream in
//! the crate derives from these helpers, which pins outputs across platforms
//! and worker counts.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a over the UTF-8 bytes of `parts`, with a separator between parts so
/// ("ab","c") and ("a","bc") hash differently.
pub fn stable_hash(parts: &[&str]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for part in parts {
        for b in part.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(PRIME);
        }
        h ^= 0xff;
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// splitmix64 finalizer.
pub fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic per-document stream: documents can be processed in any
/// order, on any number of workers, and still draw identical samples.
pub fn document_rng(seed: u64, doc_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed ^ mix(doc_index)))
}

/// Deterministic stream keyed by a string, used to break alignment ties the
/// same way no matter how the seed corpus is ordered or partitioned.
pub fn keyed_rng(parts: &[&str]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(stable_hash(parts)))
}
