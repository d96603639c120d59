//! Small shared helpers: stable hashing, float formatting, shuffling.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

// Explicit Fisher–Yates so the shuffle order is pinned by this crate, not by
// whatever `rand` ships in a given release.
pub(crate) fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

/// FNV-1a 64-bit hash, used for vocabulary fingerprints and file checksums.
pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Streaming FNV-1a 64-bit hasher.
#[derive(Debug, Clone)]
pub(crate) struct Fnv1a64(u64);

impl Fnv1a64 {
    pub fn new() -> Self {
        Self(0xcbf29ce484222325)
    }

    pub fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// Formats with 17 significant digits, enough to round-trip any f64 exactly.
pub(crate) fn fmt_f64_17(x: f64) -> String {
    format!("{x:.16e}")
}
