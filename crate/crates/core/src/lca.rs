//! Constant-time join (lowest common ancestor) queries.
//!
//! Euler tour of the tree plus a sparse table of range minima over tour
//! depths. Build is `O(N log N)` time and space for `N` nodes; each query is
//! two table lookups.

use crate::tree::{MergeTree, NodeId};

#[derive(Debug, Clone)]
pub struct LcaIndex {
    tour: Vec<u32>,
    first: Vec<u32>,
    depth: Vec<u32>,
    /// `table[k][i]` is the tour position of the minimum depth in
    /// `i .. i + 2^k`, leftmost on ties.
    table: Vec<Vec<u32>>,
}

impl LcaIndex {
    pub fn build(t: &MergeTree) -> LcaIndex {
        let n = t.len();
        assert!(n < u32::MAX as usize / 2, "tree too large for LcaIndex");
        let mut tour = Vec::with_capacity(2 * n - 1);
        let mut depth = Vec::with_capacity(2 * n - 1);
        let mut first = vec![u32::MAX; n];

        // (node, depth, index of next child to visit)
        let mut stack: Vec<(NodeId, u32, usize)> = vec![(t.root(), 0, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, d, next) = *top;
            if next == 0 {
                first[v.index()] = tour.len() as u32;
            }
            tour.push(v.index() as u32);
            depth.push(d);
            match t.children(v).get(next) {
                Some(&c) => {
                    top.2 += 1;
                    stack.push((c, d + 1, 0));
                }
                None => {
                    stack.pop();
                }
            }
        }
        // A node is emitted on entry and again after each child returns.
        debug_assert_eq!(tour.len(), 2 * n - 1);

        let m = tour.len();
        let levels = usize::BITS as usize - m.leading_zeros() as usize;
        let mut table: Vec<Vec<u32>> = Vec::with_capacity(levels);
        table.push((0..m as u32).collect());
        for k in 1..levels {
            let half = 1usize << (k - 1);
            let prev = &table[k - 1];
            let width = m + 1 - (1usize << k);
            let mut row = Vec::with_capacity(width);
            for i in 0..width {
                let (a, b) = (prev[i], prev[i + half]);
                row.push(if depth[b as usize] < depth[a as usize] { b } else { a });
            }
            table.push(row);
        }

        LcaIndex {
            tour,
            first,
            depth,
            table,
        }
    }

    /// The join `a ∨ b`: the lowest node above both.
    #[inline]
    pub fn join(&self, a: NodeId, b: NodeId) -> NodeId {
        let (fa, fb) = (self.first[a.index()], self.first[b.index()]);
        let (l, r) = if fa <= fb { (fa, fb) } else { (fb, fa) };
        let (l, r) = (l as usize, r as usize);
        let k = (usize::BITS - 1 - (r - l + 1).leading_zeros()) as usize;
        let row = &self.table[k];
        let x = row[l];
        let y = row[r + 1 - (1usize << k)];
        let pos = if self.depth[y as usize] < self.depth[x as usize] { y } else { x };
        NodeId(self.tour[pos as usize] as usize)
    }

    pub fn euler_tour(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.tour.iter().map(|&v| NodeId(v as usize))
    }

    pub fn first_occurrence(&self, v: NodeId) -> usize {
        self.first[v.index()] as usize
    }

    pub fn tour_depths(&self) -> &[u32] {
        &self.depth
    }

    /// Number of sparse-table layers.
    pub fn levels(&self) -> usize {
        self.table.len()
    }
}
