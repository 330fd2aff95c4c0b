//! Seeded random streams.
//!
//! Every stochastic step draws from a ChaCha8 generator keyed by the user seed
//! and a stream number derived from where the draw happens, so reruns are
//! bit-identical and independent steps never share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Packs a hierarchy of small indices into one stream number.
pub fn stream_id(parts: &[u64]) -> u64 {
    // FNV-1a over the little-endian bytes of each part.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in parts {
        for b in p.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Child seed for a nested experiment (simulation repetitions, grid cells).
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    use rand::RngCore;
    stream(seed, stream_id(parts)).next_u64()
}
