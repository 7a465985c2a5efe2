//! Deterministic random streams.
//!
//! Every simulated unit draws from its own ChaCha8 stream, keyed by the base
//! seed and a stream id. Within a stream, units are addressed by index. The ChaCha block counter
//! is positioned at `index << 32`, so each index owns 2^32 words of
//! keystream and units never overlap regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const WORDS_PER_INDEX_SHIFT: u32 = 32;

/// Generator for unit `index` of stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) << WORDS_PER_INDEX_SHIFT);
    rng
}
