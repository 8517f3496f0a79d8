//! Seed derivation and the generator used everywhere in the crate.
//!
//! Every parallel task gets its own generator seeded from
//! `derive_seed(master, path)`, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream tags keep independent consumers of one master seed apart.
pub mod stream {
    pub const DIRECTION: u64 = 0x4449_5245;
    pub const SAMPLES: u64 = 0x5341_4d50;
    pub const RADIAL: u64 = 0x5241_4449;
    pub const PAIRS: u64 = 0x5041_4952;
    pub const BOOTSTRAP: u64 = 0x424f_4f54;
    pub const SEARCH: u64 = 0x5345_4152;
    pub const SHARD: u64 = 0x5348_4152;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash a master seed together with a path of integers (n, θ index, shard...).
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for &p in path {
        h = splitmix64(h ^ splitmix64(p.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    h
}

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn derived(master: u64, path: &[u64]) -> SimRng {
    seeded(derive_seed(master, path))
}
