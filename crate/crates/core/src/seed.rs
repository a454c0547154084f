//! Seed splitting.
//!
//! All randomness derives from one 64-bit master seed. A sub-seed for a
//! `(stream, index)` pair is the SplitMix64 finaliser applied to the master
//! seed mixed with both coordinates, so that e.g. replicate 7 of a sweep or
//! edge 12 of a repeater insertion gets the same stream no matter which other
//! jobs ran before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named streams, so unrelated consumers never share sub-seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Points = 1,
    Repeaters = 2,
    Replicate = 3,
    MergeOrder = 4,
    Bootstrap = 5,
    Fiber = 6,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(master: u64, stream: Stream, index: u64) -> u64 {
    splitmix(splitmix(master ^ splitmix(stream as u64)) ^ index)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream_rng(master: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    rng(derive(master, stream, index))
}
