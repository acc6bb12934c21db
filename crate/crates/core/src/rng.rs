//! Seeded random streams.
//!
//! Every generator draws from ChaCha8 keyed by the instance seed. Each sampling
//! purpose reads its own ChaCha stream (the 64-bit stream id of the cipher), so
//! changing how many numbers one purpose consumes never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids. Values are part of the reproducibility contract; append only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Angles = 1,
    Graph = 2,
    Labels = 3,
    Rewiring = 4,
    Offsets = 5,
    Points = 6,
    Noise = 7,
    StartVector = 8,
    Triangles = 9,
    Restart = 10,
}

pub fn stream(seed: u64, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `trial` at grid point `point` of a sweep.
pub fn derive_seed(master: u64, point: u64, trial: u64) -> u64 {
    mix(mix(mix(master) ^ point) ^ trial.wrapping_mul(0xd1b5_4a32_d192_ed03))
}
