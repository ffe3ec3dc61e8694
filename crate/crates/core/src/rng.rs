//! Seeded random streams.
//!
//! Every stochastic operation takes either a `&mut impl Rng` (sequential
//! work such as a single shuffle) or a `u64` seed from which per-run
//! substreams are split by index. Splitting by index keeps Monte Carlo
//! results bit-identical regardless of how runs are spread over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// A fresh stream for `seed`.
pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hands out independent substreams of one master seed.
#[derive(Clone, Debug)]
pub struct Substreams {
    base: ChaCha8Rng,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Substreams {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The substream for run `index`.
    pub fn get(&self, index: u64) -> StreamRng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        rng
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable 64-bit hash of a tuple of words.
///
/// Unlike `std::hash::DefaultHasher` the output is fixed across toolchains,
/// which record seeds written to CSV depend on.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut h = 0x6A09_E667_F3BC_C908u64;
    for &p in parts {
        h = splitmix64(h ^ splitmix64(p));
    }
    h
}

/// Stable hash of a string label, for mixing experiment kinds into seeds.
pub fn label_word(label: &str) -> u64 {
    // FNV-1a
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}
