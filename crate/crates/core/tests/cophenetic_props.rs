mod common;

use common::{constructive_morphism, naive_cophenetic, permute_raw, rng};
use phylo_core::random::{random_phylo, Heights};
use phylo_core::{
    cophenetic_of, hom_exists, linf_distance, lp_distance, smooth, MergeTree, Norm, PhyloTree,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

const UNIFORM: Heights = Heights::Uniform { lo: 0.0, hi: 100.0 };
const COARSE: Heights = Heights::Dyadic { lo: 0.0, hi: 8.0, bits: 1 };

#[test]
fn linf_matches_enumeration() {
    let mut r = rng(1);
    for _ in 0..200 {
        let a = random_phylo(&mut r, 8, UNIFORM);
        let b = random_phylo(&mut r, 8, UNIFORM);
        let (ca, cb) = (cophenetic_of(&a), cophenetic_of(&b));
        assert_eq!(ca.entries(), naive_cophenetic(&a).as_slice());
        let brute = naive_cophenetic(&a)
            .iter()
            .zip(naive_cophenetic(&b))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert_eq!(linf_distance(&ca, &cb).unwrap(), brute);
    }
}

#[test]
fn p_infinity_delegates() {
    let mut r = rng(2);
    for _ in 0..100 {
        let n = r.gen_range(1..=10);
        let a = cophenetic_of(&random_phylo(&mut r, n, UNIFORM));
        let b = cophenetic_of(&random_phylo(&mut r, n, UNIFORM));
        assert_eq!(lp_distance(&a, &b, Norm::LInf).unwrap(), linf_distance(&a, &b).unwrap());
        let l1 = lp_distance(&a, &b, Norm::L1).unwrap();
        let l2 = lp_distance(&a, &b, Norm::L2).unwrap();
        let li = linf_distance(&a, &b).unwrap();
        assert!(li <= l2 + 1e-9 && l2 <= l1 + 1e-9);
    }
}

#[test]
fn vector_criterion_agrees_with_explicit_maps() {
    let mut r = rng(3);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..2000 {
        let n = r.gen_range(1..=6);
        let heights = if r.gen_bool(0.5) { UNIFORM } else { COARSE };
        let a = random_phylo(&mut r, n, heights);
        let b = random_phylo(&mut r, n, heights);
        let eps = if r.gen_bool(0.5) { r.gen_range(0.0..100.0) } else { r.gen_range(0..20) as f64 * 0.5 };
        for (x, y) in [(&a, &b), (&a, &smooth(&b, eps).unwrap()), (&smooth(&a, eps).unwrap(), &b)] {
            let (cx, cy) = (cophenetic_of(x), cophenetic_of(y));
            let fast = hom_exists(&cx, &cy).unwrap();
            let explicit = constructive_morphism(x, y).is_some();
            assert_eq!(fast, explicit, "{x:?}\n{y:?}");
            if explicit {
                yes += 1;
                for (p, q) in cx.entries().iter().zip(cy.entries()) {
                    assert!(q <= p);
                }
            } else {
                no += 1;
            }
        }
        let s = smooth(&a, 0.5).unwrap();
        assert!(constructive_morphism(&a, &s).is_some());
        assert!(constructive_morphism(&a, &a).is_some());
    }
    assert!(yes > 500 && no > 500, "yes={yes} no={no}");
}

fn random_same_labels(seed: u64, n: usize) -> PhyloTree {
    random_phylo(&mut rng(seed), n, COARSE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pseudometric(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), n in 1usize..10) {
        let [a, b, c] = [s1, s2, s3].map(|s| cophenetic_of(&random_same_labels(s, n)));
        let d = |x, y| linf_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn mutual_morphisms_mean_equal_vectors(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..5) {
        let a = cophenetic_of(&random_same_labels(s1, n));
        let b = cophenetic_of(&random_same_labels(s2, n));
        if hom_exists(&a, &b).unwrap() && hom_exists(&b, &a).unwrap() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn invariant_under_layout(seed in any::<u64>(), n in 1usize..16) {
        let mut r = rng(seed);
        let t = random_phylo(&mut r, n, UNIFORM);
        // Insert a pass-through node above every leaf and scramble indices.
        let mut raw = t.tree().to_raw();
        for i in 0..raw.len() {
            if raw[i].name.is_some() {
                if let Some(p) = raw[i].parent {
                    let mid = raw[i].height;
                    raw.push(phylo_core::RawNode::new(mid, Some(p)));
                    raw[i].parent = Some(raw.len() - 1);
                }
            }
        }
        let mut perm: Vec<usize> = (0..raw.len()).collect();
        perm.shuffle(&mut r);
        let u = PhyloTree::from_named(MergeTree::build(&permute_raw(&raw, &perm)).unwrap()).unwrap();
        prop_assert_eq!(cophenetic_of(&u), cophenetic_of(&t));
        prop_assert_eq!(u, t);
    }
}
