//! Counter-based seed derivation.
//!
//! Every random stream is keyed by the master seed, a purpose tag, and a
//! tuple of counters (epoch, class, replication, ...). The key is folded
//! through SplitMix64 into a 256-bit ChaCha8 seed, so a stream depends only
//! on its key and never on the order in which streams are created.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose tags keep streams with equal counters apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    LearnInfinite = 1,
    LearnFinite = 2,
    Labels = 3,
    FlowEstimate = 4,
    Deviation = 5,
    PlayerChoice = 6,
    Contraction = 7,
    Misc = 8,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for `(master, tag, counters)`.
pub fn derive(master: u64, tag: Stream, counters: &[u64]) -> StreamRng {
    let mut state = master;
    let mut acc = splitmix64(&mut state) ^ (tag as u64);
    for &c in counters {
        state ^= acc;
        acc = splitmix64(&mut state) ^ c.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    }
    state ^= acc;
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
