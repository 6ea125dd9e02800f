//! Seeded random streams.
//!
//! Every stochastic routine draws from ChaCha20 (`rand_chacha::ChaCha20Rng`)
//! seeded with `seed_from_u64(seed)`. Independent streams are obtained from
//! the same seed by selecting a ChaCha stream number, so replicate `r` of grid
//! point `g` never shares key-stream with any other replicate:
//!
//! | use                         | stream id                     |
//! |-----------------------------|-------------------------------|
//! | single `sample` call        | 0                             |
//! | surrogate `r`               | `r`                           |
//! | sweep draw (grid `g`, rep `r`) | `(g << 33) \| (r << 1)`    |
//! | matched null for that draw  | `(g << 33) \| (r << 1) \| 1`  |

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Concrete generator used throughout the crate.
pub type StreamRng = ChaCha20Rng;

/// Generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for replicate `replicate` of grid point `grid_index`.
/// `null` selects the companion stream used for the matched independent sample.
pub fn sweep_stream(grid_index: usize, replicate: usize, null: bool) -> u64 {
    ((grid_index as u64) << 33) | ((replicate as u64) << 1) | u64::from(null)
}
