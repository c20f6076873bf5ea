//! Deterministic RNG streams keyed by a base seed and a position in the tree.
//!
//! A child map draws from a stream derived from `(seed, path)`, never from
//! a shared generator, so results do not depend on the order (or thread) in
//! which sibling maps are trained.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::som::GridPos;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn stream_seed(seed: u64, path: &[GridPos]) -> u64 {
    let mut h = splitmix64(seed);
    for p in path {
        h = splitmix64(h ^ (p.col as u64).wrapping_mul(0x1000_0000_01b3));
        h = splitmix64(h ^ (p.row as u64).wrapping_add(0x5851_f42d_4c95_7f2d));
    }
    h
}

pub(crate) fn stream(seed: u64, path: &[GridPos]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, path))
}
