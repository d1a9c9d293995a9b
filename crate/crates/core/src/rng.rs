//! Deterministic random streams.
//!
//! Every chain or ensemble member draws from its own ChaCha8 stream, keyed by
//! the root seed and the member index, so results never depend on how work is
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Returns the generator for work unit `index` under `root_seed`.
pub fn stream(root_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(index);
    rng
}
