//! Random trees for tests, benchmarks and fuzzing.

use rand::Rng;

use crate::tree::{MergeTree, PhyloTree, RawNode};

/// How node heights are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Heights {
    /// Uniform in `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Multiples of `2^-bits` in `[lo, hi]`; every value and every difference
    /// of two values is exact in `f64` for modest ranges.
    Dyadic { lo: f64, hi: f64, bits: u32 },
}

impl Heights {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Heights::Uniform { lo, hi } | Heights::Dyadic { lo, hi, .. } => (lo, hi),
        }
    }

    /// A value in `[from, hi]`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, from: f64) -> f64 {
        let (_, hi) = self.bounds();
        match *self {
            Heights::Uniform { .. } => {
                if from >= hi {
                    hi
                } else {
                    rng.gen_range(from..=hi)
                }
            }
            Heights::Dyadic { bits, .. } => {
                let scale = (1u64 << bits) as f64;
                let lo_k = (from * scale).ceil() as i64;
                let hi_k = (hi * scale).floor() as i64;
                if lo_k >= hi_k {
                    return (hi_k as f64) / scale;
                }
                rng.gen_range(lo_k..=hi_k) as f64 / scale
            }
        }
    }
}

/// Leaf names `t000`, `t001`, ... padded so lexicographic and numeric order
/// agree.
pub fn leaf_names(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("t{i:0width$}")).collect()
}

/// A labeled tree on `n >= 1` leaves. Clusters are merged at random, two at a
/// time or occasionally three, and every merge sits at or above its children.
pub fn random_phylo<R: Rng + ?Sized>(rng: &mut R, n: usize, heights: Heights) -> PhyloTree {
    assert!(n >= 1);
    let (lo, _) = heights.bounds();
    let names = leaf_names(n);
    let mut raw: Vec<RawNode> = names
        .into_iter()
        .map(|name| RawNode::named(heights.sample(rng, lo), None, name))
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    while active.len() > 1 {
        let k = if active.len() >= 3 && rng.gen_bool(0.15) { 3 } else { 2 };
        let merged: Vec<usize> = (0..k)
            .map(|_| {
                let at = rng.gen_range(0..active.len());
                active.swap_remove(at)
            })
            .collect();
        let floor = merged.iter().map(|&c| raw[c].height).fold(f64::MIN, f64::max);
        let id = raw.len();
        raw.push(RawNode::new(heights.sample(rng, floor), None));
        for c in merged {
            raw[c].parent = Some(id);
        }
        active.push(id);
    }
    PhyloTree::from_named(MergeTree::build(&raw).expect("generated tree is valid"))
        .expect("generated names are unique")
}

/// Unvalidated random rooted tree on `nodes` nodes where node `i > 0` hangs
/// from a random earlier node. Contains pass-through nodes; heights decrease
/// away from node 0.
pub fn random_raw<R: Rng + ?Sized>(rng: &mut R, nodes: usize) -> Vec<RawNode> {
    assert!(nodes >= 1);
    let mut raw = vec![RawNode::new(100.0, None)];
    for i in 1..nodes {
        let p = rng.gen_range(0..i);
        // Zero-length edges are drawn on purpose.
        let h = raw[p].height - 0.5 * rng.gen_range(0..4) as f64;
        raw.push(RawNode::new(h, Some(p)));
    }
    let mut leaf = 0;
    let has_child: Vec<bool> = {
        let mut v = vec![false; nodes];
        for r in &raw {
            if let Some(p) = r.parent {
                v[p] = true;
            }
        }
        v
    };
    for (i, r) in raw.iter_mut().enumerate() {
        if !has_child[i] {
            r.name = Some(format!("L{leaf}"));
            leaf += 1;
        }
    }
    raw
}
