// SPDX-License-Identifier: Apache-2.0

//! Reproducible random streams.
//!
//! Every independent task (a chain, a trace, a batch of paths) draws from its
//! own ChaCha stream keyed by `(seed, stream)`, so results do not depend on
//! how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type LabRng = ChaCha8Rng;

/// Independent substream `stream` of the master `seed`.
pub fn substream(seed: u64, stream: u64) -> LabRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Number of worker threads, taken from `SAWLAB_THREADS` when set.
pub fn default_parallelism() -> usize {
    std::env::var("SAWLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}
