#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shearlet_transport::geometry::{merge_pairs, Partition};
use shearlet_transport::solver::{apply_marking, candidates, Choice, Mode, Refinement};

/// Random refinement history: each step marks a random subset of cells and gives
/// every marked cell one of its candidate refinements, chosen at random.
pub fn random_refinements(seed: u64, steps: usize) -> Vec<Partition> {
    let (first, steps) = random_history(seed, steps);
    std::iter::once(first).chain(steps.into_iter().map(|r| r.partition)).collect()
}

/// The initial grid and every refinement step with its parent lists.
pub fn random_history(seed: u64, steps: usize) -> (Partition, Vec<Refinement>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Partition::uniform(rng.gen_range(0..=2));
    let first = p.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let frac = rng.gen_range(0.1..0.6);
        let mode = if rng.gen_bool(0.8) { Mode::Anisotropic } else { Mode::Isotropic };
        let mut marked = Vec::with_capacity(p.len());
        let mut choices = Vec::with_capacity(p.len());
        for cell in &p.cells {
            let mut cands = candidates(cell, mode).expect("candidates");
            let pick = rng.gen_range(0..cands.len());
            choices.push(Choice { children: cands.swap_remove(pick), score2: 0.0 });
            marked.push(rng.gen_bool(frac));
        }
        let r = apply_marking(&p, choices, &marked);
        p = r.partition.clone();
        out.push(r);
    }
    (first, out)
}

/// Whether merging an already merged set changes nothing.
pub fn merge_is_idempotent(p: &Partition) -> bool {
    let once = merge_pairs(p.cells.clone());
    let twice = merge_pairs(once.clone());
    once == twice
}
