//! Sub-seed derivation.
//!
//! Every random stream in the crate is derived from one user seed by a counter
//! scheme: `derive(seed, stream, index)` mixes the three words with SplitMix64
//! finalizers. `stream` names the consumer (see the constants below) and `index`
//! enumerates items within it (realization number, fold number, ...).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_SUBSAMPLE: u64 = 1;
pub const STREAM_SPLIT: u64 = 2;
pub const STREAM_FOLD: u64 = 3;
pub const STREAM_POISSON: u64 = 4;
pub const STREAM_REPRESENT: u64 = 5;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ stream) ^ index)
}

pub fn rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, stream, index))
}
