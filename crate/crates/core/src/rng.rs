//! Labeled, reproducible random streams.
//!
//! A stream is identified by a 64-bit seed and a label. The generator is
//! ChaCha8 keyed by a mix of the two, so the sample sequence is identical
//! across runs and platforms and independent of how many other streams were
//! drawn before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RandomStream {
    seed: u64,
    label: String,
}

impl RandomStream {
    pub fn new(seed: u64, label: impl Into<String>) -> Self {
        Self {
            seed,
            label: label.into(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Nested substream, e.g. `tier4` -> `tier4/parents`.
    pub fn child(&self, suffix: &str) -> RandomStream {
        RandomStream::new(self.seed, format!("{}/{}", self.label, suffix))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix(self.seed, fnv1a(self.label.as_bytes())))
    }
}

/// Seed of realization `k` in a batch started from `base`. Depends only on
/// `(base, k)`, never on scheduling.
pub fn derive_seed(base: u64, k: u64) -> u64 {
    mix(base, splitmix64(k ^ 0x6a09_e667_f3bc_c908))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mix(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b.rotate_left(17))
}
