//! Keyed, splittable random substreams.
//!
//! Every frame gets its own generator derived from
//! `(master_seed, snr_index, frame_index)`, so results are independent of
//! worker count and scheduling order. The key words are absorbed through a
//! SplitMix64-style mixer into a 256-bit ChaCha seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-frame generator for `(master_seed, stream, frame)`.
pub fn frame_rng(master_seed: u64, stream: u64, frame: u64) -> ChaCha8Rng {
    let mut state = mix(master_seed.wrapping_add(GOLDEN_GAMMA));
    state = mix(state.wrapping_add(GOLDEN_GAMMA).wrapping_add(stream));
    state = mix(state.wrapping_add(GOLDEN_GAMMA).wrapping_add(frame));
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN_GAMMA);
        chunk.copy_from_slice(&mix(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
