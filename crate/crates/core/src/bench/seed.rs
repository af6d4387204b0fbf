//! Stable seed derivation.
//!
//! A task seed is the first eight bytes (little endian) of
//! `SHA-256("{base_seed}\x1f{dataset}\x1f{method}\x1f{size}\x1f{rep}")`.
//! Independent streams inside a task hash `"{seed}\x1f{tag}"` the same way.

use sha2::{Digest, Sha256};

const SEP: char = '\x1f';

fn hash_u64(text: &str) -> u64 {
    let digest = Sha256::digest(text.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn derive_seed(base_seed: u64, dataset: &str, method: &str, size: usize, rep: usize) -> u64 {
    hash_u64(&format!("{base_seed}{SEP}{dataset}{SEP}{method}{SEP}{size}{SEP}{rep}"))
}

/// Named substream of a seed, e.g. `"sample"`, `"pilot"` or `"kmeans"`.
pub fn substream(seed: u64, tag: &str) -> u64 {
    hash_u64(&format!("{seed}{SEP}{tag}"))
}
