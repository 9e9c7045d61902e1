//! Seed derivation for reproducible parallel Monte Carlo.
//!
//! Work is split into fixed-size chunks; each chunk draws from its own ChaCha
//! stream derived from `(seed, purpose, chunk index)`, and chunk results are
//! reduced in index order. Results therefore do not depend on how rayon
//! schedules the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent child seed.
pub fn derive(seed: u64, tag: u64) -> u64 {
    mix(seed ^ mix(tag))
}

pub fn stream(seed: u64, tag: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, tag));
    rng.set_stream(index);
    rng
}

pub const CHUNK: usize = 4096;

/// Run `n` draws split into deterministic chunks; returns per-chunk results in
/// chunk order.
pub fn chunked<T, F>(seed: u64, tag: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Rng, usize) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, tag, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            f(&mut rng, len)
        })
        .collect()
}
