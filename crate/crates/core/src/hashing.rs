//! Seeded FNV-1a hashing.
//!
//! The standard library hasher is not guaranteed stable across releases, so
//! everything that must be reproducible (feature hashing, mock backends,
//! registry fingerprints) goes through this fixed algorithm instead.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over `bytes`, with the seed folded into the initial state.
pub fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET ^ seed.wrapping_mul(FNV_PRIME);
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Hash of several byte strings with separators, avoiding concatenation
/// ambiguity ("ab","c" hashes differently from "a","bc").
pub fn fnv1a_parts(seed: u64, parts: &[&[u8]]) -> u64 {
    let mut h = FNV_OFFSET ^ seed.wrapping_mul(FNV_PRIME);
    for part in parts {
        for &b in *part {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        h ^= 0x1f;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}
