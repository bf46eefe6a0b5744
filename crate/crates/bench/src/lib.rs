//! Shared fixtures for the benchmarks.

use phylo_core::random::{random_phylo, Heights};
use phylo_core::PhyloTree;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two random trees on the same `n` leaf names, fixed by `seed`.
pub fn tree_pair(n: usize, seed: u64) -> (PhyloTree, PhyloTree) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = Heights::Uniform { lo: 0.0, hi: 100.0 };
    (random_phylo(&mut rng, n, h), random_phylo(&mut rng, n, h))
}
