//! Counter-style seed derivation.
//!
//! Every random draw in the crate comes from a ChaCha stream whose key is a
//! hash of `(seed, label, index...)`. Streams are therefore independent of
//! evaluation order and thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

/// Labels that separate the independent substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Predictors = 1,
    Response = 2,
    Error = 3,
    Projections = 4,
    Bootstrap = 5,
    Replicate = 6,
    Fold = 7,
    Labels = 8,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one 64-bit key.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stream keyed by `(seed, label, index)`.
pub fn substream(seed: u64, label: Stream, index: u64) -> StreamRng {
    let mut key = [0u8; 32];
    let mut h = derive_seed(seed, &[label as u64, index]);
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&h.to_le_bytes());
        h = splitmix64(h);
    }
    StreamRng::from_seed(key)
}
