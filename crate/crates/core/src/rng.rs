//! Counter-based random stream derivation.
//!
//! Every sampled object derives its generator from `(seed, stream, counter)`
//! through a SplitMix64 key expansion, so samples are reproducible and
//! independent of worker scheduling.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// Stream tags keep unrelated consumers of the same seed decorrelated.
pub mod stream {
    pub const WALLS: u64 = 0x57414c4c; // "WALL"
    pub const EDGES: u64 = 0x45444745; // "EDGE"
    pub const FADE: u64 = 0x46414445; // "FADE"
    pub const SAMPLE: u64 = 0x53414d50; // "SAMP"
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic ChaCha8 generator for object `(stream, counter)` under `seed`.
pub fn derive(seed: u64, stream: u64, counter: u64) -> ChaCha8Rng {
    let mut state = seed ^ 0x243f6a8885a308d3;
    let mut key = [0u8; 32];
    // Mix the three coordinates through successive SplitMix64 rounds.
    state ^= splitmix64(&mut state).wrapping_add(stream);
    state ^= splitmix64(&mut state).wrapping_add(counter);
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
