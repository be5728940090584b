//! Shared helpers for integration tests.
#![allow(dead_code)]

pub mod props;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use trirecom::partition::ALL_PERMS;
use trirecom::toolkit::Work;
use trirecom::{build_region, ground_state, Partition, SizeTargets};

/// A state reached by `steps` random single-vertex flips from a random
/// ground state. Every intermediate state stays in the state space.
pub fn flip_walk(n: usize, targets: SizeTargets, steps: usize, rng: &mut ChaCha8Rng) -> Partition {
    let region = Arc::new(build_region(n).unwrap());
    let perm = ALL_PERMS[rng.gen_range(0..ALL_PERMS.len())];
    let mut w = Work::new(ground_state(region.clone(), targets, perm).unwrap());
    let len = region.len();
    for _ in 0..steps {
        let v = rng.gen_range(0..len);
        let to = 1 + (w.label(v) + rng.gen_range(0..2)) % 3;
        if w.can_flip(v, to) {
            w.flip(v, to, "walk").unwrap();
        }
    }
    w.part().clone()
}

/// `count` walk samples from a fixed seed.
pub fn samples(n: usize, targets: SizeTargets, count: usize, seed: u64) -> Vec<Partition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = 20 * n * n * n;
    (0..count).map(|_| flip_walk(n, targets, steps, &mut rng)).collect()
}

fn boundary_count(p: &Partition, d: u8) -> usize {
    (0..p.labels().len()).filter(|&v| p.label_of(v) == d && p.region().is_boundary(v)).count()
}

/// Walk samples with district 3 kept away from the boundary. The walk first
/// refuses flips that put more of district 3 on the boundary until none is
/// left, then walks freely under that constraint. Walks that never get there
/// are dropped.
pub fn inland_samples(n: usize, targets: SizeTargets, count: usize, seed: u64) -> Vec<Partition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = Arc::new(build_region(n).unwrap());
    let steps = 20 * n * n * n;
    let mut out = Vec::new();
    for _ in 0..count * 4 {
        if out.len() == count {
            break;
        }
        let mut part = flip_walk(n, targets, steps, &mut rng);
        for _ in 0..steps {
            let v = rng.gen_range(0..region.len());
            let to = 1 + (part.label_of(v) + rng.gen_range(0..2)) % 3;
            let mut w = Work::new(part.clone());
            if !w.can_flip(v, to) {
                continue;
            }
            w.flip(v, to, "walk").unwrap();
            if boundary_count(w.part(), 3) <= boundary_count(&part, 3) {
                part = w.part().clone();
            }
        }
        if boundary_count(&part, 3) == 0 {
            out.push(part);
        }
    }
    out
}
