//! Seed derivation for replicas and counter-keyed Gaussian draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Human-readable statement of the per-task seed rule, recorded in manifests.
pub const SEED_RULE: &str =
    "splitmix64(root_seed ^ fnv1a64(experiment)) folded with splitmix64(replica_index + 1)";

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed of replica `index` of `experiment` under `root`. Depends only on
/// its three arguments, so adding replicas never perturbs existing ones.
pub fn task_seed(root: u64, experiment: &str, index: u64) -> u64 {
    let base = splitmix64(root ^ fnv1a64(experiment.as_bytes()));
    splitmix64(base ^ splitmix64(index.wrapping_add(1)))
}

/// Seeds for `count` replicas; `None` if two of them collide.
pub fn replica_seeds(root: u64, experiment: &str, count: usize) -> Option<Vec<u64>> {
    let seeds: Vec<u64> = (0..count as u64)
        .map(|i| task_seed(root, experiment, i))
        .collect();
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(seeds)
    }
}

/// A pair of independent standard normals determined by `(seed, key)` alone.
pub fn keyed_normal_pair(seed: u64, key: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    let a: f64 = StandardNormal.sample(&mut rng);
    let b: f64 = StandardNormal.sample(&mut rng);
    (a, b)
}
