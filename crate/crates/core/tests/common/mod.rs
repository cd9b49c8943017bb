#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flipred::seqgen::{random_instance, GenSpec};
use flipred::{EdgeLabel, FlipSequence, Setting, Triangulation};

pub fn instance(setting: Setting, edges: usize, seed: u64) -> Triangulation {
    random_instance(&GenSpec::new(setting, edges, 1, 1.0, seed)).unwrap()
}

/// Random valid walk of `len` flips, repeats allowed; stops early if nothing
/// is flippable.
pub fn random_walk(t: &Triangulation, len: usize, seed: u64) -> FlipSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner: Vec<EdgeLabel> = t.interior_labels().collect();
    let mut s = t.clone();
    let mut out = FlipSequence::new();
    while out.len() < len {
        let flippable: Vec<EdgeLabel> = inner.iter().copied().filter(|&l| s.flippable(l).unwrap()).collect();
        if flippable.is_empty() {
            break;
        }
        let l = flippable[rng.gen_range(0..flippable.len())];
        s.flip_in_place(l).unwrap();
        out.push(l);
    }
    out
}

/// Random walk that only picks among a few labels, so repeats are frequent.
pub fn clustered_walk(t: &Triangulation, len: usize, labels: usize, seed: u64) -> FlipSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inner: Vec<EdgeLabel> = t.interior_labels().collect();
    let start = rng.gen_range(0..inner.len());
    inner.rotate_left(start);
    let mut pool: Vec<EdgeLabel> = Vec::new();
    for l in inner {
        if pool.len() == labels {
            break;
        }
        if pool.is_empty() || pool.iter().any(|&p| t.neighbors(p).unwrap().contains(&l)) {
            pool.push(l);
        }
    }
    let mut s = t.clone();
    let mut out = FlipSequence::new();
    while out.len() < len {
        let flippable: Vec<EdgeLabel> = pool.iter().copied().filter(|&l| s.flippable(l).unwrap()).collect();
        if flippable.is_empty() {
            break;
        }
        let l = flippable[rng.gen_range(0..flippable.len())];
        s.flip_in_place(l).unwrap();
        out.push(l);
    }
    out
}
