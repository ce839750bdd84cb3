//! Seeded randomness.
//!
//! Every random component draws from a ChaCha8 stream whose 64-bit seed is
//! `splitmix64(seed ^ fnv1a64(label))`. Distinct labels ("A", "points",
//! "dirs", "trial/17", ...) give independent streams from one user seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rat::{Rat, RatVec};

pub type LabRng = ChaCha8Rng;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream for component `label` of a run seeded with `seed`.
pub fn derive(seed: u64, label: &str) -> LabRng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ fnv1a64(label.as_bytes())))
}

/// Per-index substream, e.g. one per Monte Carlo trial batch.
pub fn derive_indexed(seed: u64, label: &str, index: u64) -> LabRng {
    derive(splitmix64(seed ^ splitmix64(index.wrapping_add(1))), label)
}

pub const DIR_BITS: u32 = 20;

/// Direction with coordinates `j / 2^20`, `j` uniform in `[-2^20, 2^20]`.
pub fn dyadic_direction(rng: &mut impl Rng, dim: usize) -> RatVec {
    let scale = 1i64 << DIR_BITS;
    (0..dim)
        .map(|_| Rat::new(rng.gen_range(-scale..=scale), scale))
        .collect()
}
