//! Oracles shared by the integration tests. Nothing here goes through
//! `LcaIndex` or the cophenetic vector code.

#![allow(dead_code)]

use std::collections::HashSet;

use phylo_core::{smooth, MergeTree, NodeId, PhyloTree, PosetWithFlow, RawNode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Walk-up LCA: first ancestor of `b` that is also an ancestor of `a`.
pub fn naive_lca(t: &MergeTree, a: NodeId, b: NodeId) -> NodeId {
    let mut up = HashSet::new();
    let mut cur = Some(a);
    while let Some(v) = cur {
        up.insert(v);
        cur = t.parent(v);
    }
    let mut cur = b;
    while !up.contains(&cur) {
        cur = t.parent(cur).expect("trees share a root");
    }
    cur
}

/// Same walk-up on unvalidated parent links.
pub fn naive_raw_join(raw: &[RawNode], a: usize, b: usize) -> usize {
    let mut up = HashSet::new();
    let mut cur = Some(a);
    while let Some(v) = cur {
        up.insert(v);
        cur = raw[v].parent;
    }
    let mut cur = b;
    while !up.contains(&cur) {
        cur = raw[cur].parent.unwrap();
    }
    cur
}

/// Cophenetic entries by enumeration, in row-major upper-triangular order.
pub fn naive_cophenetic(t: &PhyloTree) -> Vec<f64> {
    let n = t.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            out.push(t.tree().height(naive_lca(t.tree(), t.leaf(i), t.leaf(j))));
        }
    }
    out
}

/// Leaves counted by a depth-first walk over child lists from the root.
pub fn count_leaves_dfs(t: &MergeTree) -> usize {
    let mut stack = vec![t.root()];
    let mut count = 0;
    while let Some(v) = stack.pop() {
        let ch = t.children(v);
        if ch.is_empty() {
            count += 1;
        }
        stack.extend_from_slice(ch);
    }
    count
}

/// A point of a merge tree: the node at the bottom of the edge it lies on,
/// and its height. A point at a vertex's height is that vertex.
pub type Point = (NodeId, f64);

/// The point at height `h` on the upward path from `from`.
pub fn point_above(t: &MergeTree, from: NodeId, h: f64) -> Option<Point> {
    if t.height(from) > h {
        return None;
    }
    let mut w = from;
    while let Some(p) = t.parent(w) {
        if t.height(p) <= h {
            w = p;
        } else {
            break;
        }
    }
    Some((w, h))
}

/// Explicit map sending each node of the source tree to a point of the target.
#[derive(Debug, Clone)]
pub struct NodeMap(pub Vec<Point>);

/// Builds the unique height- and label-preserving map `x -> y` if it exists,
/// then re-checks the defining conditions on the result.
///
/// Each node `v` of `x` must go to the point at height `f(v)` above every
/// target leaf whose label sits below `v`; the map exists iff those points
/// agree for every `v`. Edges of `x` then map monotonically onto paths of `y`.
pub fn constructive_morphism(x: &PhyloTree, y: &PhyloTree) -> Option<NodeMap> {
    if x.names() != y.names() {
        return None;
    }
    let xt = x.tree();
    let yt = y.tree();
    let mut label_of = vec![None; xt.len()];
    for i in 0..x.n() {
        label_of[x.leaf(i).index()] = Some(i);
    }
    // Labels below each node; nodes are in preorder so reverse is postorder.
    let mut below: Vec<Vec<usize>> = vec![Vec::new(); xt.len()];
    for v in (0..xt.len()).rev() {
        if let Some(i) = label_of[v] {
            below[v].push(i);
        }
        for &c in xt.children(NodeId(v)) {
            let moved = below[c.index()].clone();
            below[v].extend(moved);
        }
    }
    let mut map = Vec::with_capacity(xt.len());
    for (v, leaves) in below.iter().enumerate() {
        let h = xt.height(NodeId(v));
        let mut target: Option<Point> = None;
        for &i in leaves {
            let p = point_above(yt, y.leaf(i), h)?;
            match target {
                None => target = Some(p),
                Some(q) if q.0 == p.0 => {}
                Some(_) => return None,
            }
        }
        map.push(target.expect("every node has a leaf below it"));
    }

    for v in 0..xt.len() {
        let (w, h) = map[v];
        assert_eq!(h, xt.height(NodeId(v)), "function preserving");
        assert!(yt.height(w) <= h, "point lies on the edge above its node");
        if let Some(p) = yt.parent(w) {
            assert!(h < yt.height(p), "point is below the next vertex up");
        }
        if let Some(i) = label_of[v] {
            assert!(yt.leq(y.leaf(i), w), "label preserving");
        }
        if let Some(u) = xt.parent(NodeId(v)) {
            assert!(yt.leq(w, map[u.index()].0), "edges map to monotone paths");
        }
    }
    Some(NodeMap(map))
}

/// Phylogenetic trees ordered by the constructive oracle instead of cophenetic
/// vectors.
pub struct ConstructivePoset;

impl PosetWithFlow for ConstructivePoset {
    type Object = PhyloTree;
    type Witness = NodeMap;

    fn morphism(&self, a: &PhyloTree, b: &PhyloTree) -> Option<NodeMap> {
        constructive_morphism(a, b)
    }

    fn shift(&self, a: &PhyloTree, eps: f64) -> PhyloTree {
        smooth(a, eps).unwrap()
    }
}

/// Rebuilds `raw` with node indices permuted and sibling order shuffled.
pub fn permute_raw(raw: &[RawNode], perm: &[usize]) -> Vec<RawNode> {
    let mut out = vec![RawNode::new(0.0, None); raw.len()];
    for (old, node) in raw.iter().enumerate() {
        out[perm[old]] = RawNode {
            height: node.height,
            parent: node.parent.map(|p| perm[p]),
            name: node.name.clone(),
        };
    }
    out
}
