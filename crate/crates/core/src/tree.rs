//! Merge trees and labeled merge trees (phylogenetic trees).
//!
//! A [`MergeTree`] is a rooted tree whose nodes carry a real height that is
//! weakly increasing toward the root. The root's upward edge to `+inf` is
//! implicit. Construction validates the input and canonicalizes it:
//! pass-through vertices with a single child are collapsed, children are
//! ordered deterministically and nodes are renumbered in preorder, so two
//! isomorphic inputs produce structurally equal trees.
//!
//! A [`PhyloTree`] adds a bijection between the label indices `0..n` and the
//! leaves. Labels are ranked by leaf name, which is how trees read from
//! different files are aligned.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Index of a node inside one [`MergeTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("tree has no nodes")]
    EmptyTree,
    #[error("node {node} has non-finite height {height}")]
    NonFiniteHeight { node: usize, height: f64 },
    #[error("node {node} refers to missing parent {parent}")]
    InvalidParent { node: usize, parent: usize },
    #[error("parent links contain a cycle through node {node}")]
    CycleDetected { node: usize },
    #[error("more than one root: nodes {first} and {second}")]
    MultipleRoots { first: usize, second: usize },
    #[error("edge {child} -> {parent} is not monotone: child height {child_height} exceeds parent height {parent_height}")]
    NonMonotoneEdge {
        child: usize,
        parent: usize,
        child_height: f64,
        parent_height: f64,
    },
    #[error("expected {expected} leaf labels, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("duplicate leaf label {0:?}")]
    DuplicateLabel(String),
    #[error("leaf label must be nonempty")]
    EmptyLabel,
    #[error("leaf {0} has no name")]
    UnnamedLeaf(NodeId),
}

/// Whether an edge may join two nodes of equal height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Monotonicity {
    /// `height(child) <= height(parent)`; zero-length edges are accepted.
    #[default]
    Weak,
    /// `height(child) < height(parent)`.
    Strict,
}

/// One input node for [`MergeTree::build`]. `parent == None` marks the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RawNode {
    pub height: f64,
    pub parent: Option<usize>,
    /// Only kept on leaves; used for canonical ordering and labeling.
    pub name: Option<String>,
}

impl RawNode {
    pub fn new(height: f64, parent: Option<usize>) -> Self {
        RawNode {
            height,
            parent,
            name: None,
        }
    }

    pub fn named(height: f64, parent: Option<usize>, name: impl Into<String>) -> Self {
        RawNode {
            height,
            parent,
            name: Some(name.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub height: f64,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub name: Option<String>,
}

impl Node {
    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A validated, canonical merge tree. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeTree {
    nodes: Vec<Node>,
    root: NodeId,
}

impl MergeTree {
    /// Validates and canonicalizes `raw` with weak monotonicity.
    pub fn build(raw: &[RawNode]) -> Result<MergeTree, TreeError> {
        Self::build_with(raw, Monotonicity::Weak)
    }

    pub fn build_with(raw: &[RawNode], mono: Monotonicity) -> Result<MergeTree, TreeError> {
        if raw.is_empty() {
            return Err(TreeError::EmptyTree);
        }
        let len = raw.len();
        let mut root = None;
        for (i, node) in raw.iter().enumerate() {
            if !node.height.is_finite() {
                return Err(TreeError::NonFiniteHeight {
                    node: i,
                    height: node.height,
                });
            }
            match node.parent {
                None => match root {
                    None => root = Some(i),
                    Some(first) => {
                        return Err(TreeError::MultipleRoots {
                            first,
                            second: i,
                        })
                    }
                },
                Some(p) if p >= len => return Err(TreeError::InvalidParent { node: i, parent: p }),
                Some(p) if p == i => return Err(TreeError::CycleDetected { node: i }),
                Some(_) => {}
            }
        }
        // Every node has a parent: the links must close a cycle somewhere.
        let root = root.ok_or(TreeError::CycleDetected { node: 0 })?;

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); len];
        for (i, node) in raw.iter().enumerate() {
            if let Some(p) = node.parent {
                children[p].push(i);
            }
        }

        let mut order = Vec::with_capacity(len);
        let mut seen = vec![false; len];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &c in &children[v] {
                seen[c] = true;
                stack.push(c);
            }
        }
        if order.len() < len {
            let node = seen.iter().position(|s| !s).unwrap_or(0);
            return Err(TreeError::CycleDetected { node });
        }

        for (i, node) in raw.iter().enumerate() {
            if let Some(p) = node.parent {
                let ph = raw[p].height;
                let bad = match mono {
                    Monotonicity::Weak => node.height > ph,
                    Monotonicity::Strict => node.height >= ph,
                };
                if bad {
                    return Err(TreeError::NonMonotoneEdge {
                        child: i,
                        parent: p,
                        child_height: node.height,
                        parent_height: ph,
                    });
                }
            }
        }

        // Collapse non-root nodes with exactly one child. `kept_parent[v]` is
        // the nearest kept proper ancestor, filled top-down along `order`.
        let kept: Vec<bool> = (0..len)
            .map(|v| v == root || children[v].len() != 1)
            .collect();
        let mut kept_parent: Vec<Option<usize>> = vec![None; len];
        let mut nearest: Vec<usize> = vec![root; len];
        for &v in &order {
            if v == root {
                nearest[v] = v;
                continue;
            }
            let p = raw[v].parent.expect("non-root has parent");
            kept_parent[v] = Some(nearest[p]);
            nearest[v] = if kept[v] { v } else { nearest[p] };
        }
        let mut kchildren: Vec<Vec<usize>> = vec![Vec::new(); len];
        for &v in &order {
            if kept[v] {
                if let Some(p) = kept_parent[v] {
                    kchildren[p].push(v);
                }
            }
        }

        // Sort key per kept node: smallest leaf name below it, then height.
        let mut min_name: Vec<Option<&str>> = vec![None; len];
        for &v in order.iter().rev() {
            if !kept[v] {
                continue;
            }
            if kchildren[v].is_empty() {
                min_name[v] = raw[v].name.as_deref();
            } else {
                min_name[v] = kchildren[v]
                    .iter()
                    .filter_map(|&c| min_name[c])
                    .min();
            }
        }
        for list in kchildren.iter_mut() {
            list.sort_by(|&a, &b| {
                cmp_name(min_name[a], min_name[b])
                    .then_with(|| raw[a].height.total_cmp(&raw[b].height))
            });
        }

        // Preorder renumbering.
        let mut new_id = vec![usize::MAX; len];
        let mut nodes: Vec<Node> = Vec::new();
        let mut stack = vec![(root, None::<NodeId>)];
        while let Some((v, parent)) = stack.pop() {
            let id = NodeId(nodes.len());
            new_id[v] = id.0;
            nodes.push(Node {
                height: raw[v].height,
                parent,
                children: Vec::with_capacity(kchildren[v].len()),
                name: if kchildren[v].is_empty() {
                    raw[v].name.clone()
                } else {
                    None
                },
            });
            if let Some(p) = parent {
                nodes[p.0].children.push(id);
            }
            for &c in kchildren[v].iter().rev() {
                stack.push((c, Some(id)));
            }
        }

        Ok(MergeTree {
            nodes,
            root: NodeId(0),
        })
    }

    #[inline]
    pub fn root(&self) -> NodeId {
        self.root
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn height(&self, id: NodeId) -> f64 {
        self.nodes[id.0].height
    }

    #[inline]
    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    #[inline]
    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.0].children
    }

    /// Childless nodes in preorder.
    pub fn leaves(&self) -> Vec<NodeId> {
        // Nodes are stored in preorder, so a filter keeps that order.
        (0..self.nodes.len())
            .map(NodeId)
            .filter(|&v| self.nodes[v.0].is_leaf())
            .collect()
    }

    /// `a <=_f b`: `b` is an ancestor of `a` or `a` itself.
    pub fn leq(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = a;
        loop {
            if cur == b {
                return true;
            }
            match self.nodes[cur.0].parent {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// Nodes as [`RawNode`]s, suitable for rebuilding.
    pub fn to_raw(&self) -> Vec<RawNode> {
        self.nodes
            .iter()
            .map(|n| RawNode {
                height: n.height,
                parent: n.parent.map(NodeId::index),
                name: n.name.clone(),
            })
            .collect()
    }

    /// Same shape, every height transformed by `f`.
    pub(crate) fn map_heights(&self, f: impl Fn(f64) -> f64) -> MergeTree {
        let mut out = self.clone();
        for n in &mut out.nodes {
            n.height = f(n.height);
        }
        out
    }
}

fn cmp_name(a: Option<&str>, b: Option<&str>) -> Ordering {
    match (a, b) {
        (Some(a), Some(b)) => a.cmp(b),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// A merge tree with leaves labeled `0..n` by the lexicographic rank of their
/// names.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyloTree {
    tree: MergeTree,
    labels: Vec<NodeId>,
    names: Vec<String>,
}

impl PhyloTree {
    /// Labels a tree whose leaves already carry names.
    pub fn from_named(tree: MergeTree) -> Result<PhyloTree, TreeError> {
        let mut pairs = Vec::new();
        for leaf in tree.leaves() {
            match tree.node(leaf).name.as_deref() {
                None => return Err(TreeError::UnnamedLeaf(leaf)),
                Some("") => return Err(TreeError::EmptyLabel),
                Some(name) => pairs.push((name.to_owned(), leaf)),
            }
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(TreeError::DuplicateLabel(w[0].0.clone()));
        }
        let (names, labels) = pairs.into_iter().unzip();
        Ok(PhyloTree {
            tree,
            labels,
            names,
        })
    }

    pub fn tree(&self) -> &MergeTree {
        &self.tree
    }

    /// Number of labeled leaves.
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Leaf carrying label `i` (0-based).
    #[inline]
    pub fn leaf(&self, i: usize) -> NodeId {
        self.labels[i]
    }

    pub fn labels(&self) -> &[NodeId] {
        &self.labels
    }

    /// Leaf names sorted; position `i` is the name of label `i`.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub(crate) fn with_tree(&self, tree: MergeTree) -> PhyloTree {
        PhyloTree {
            tree,
            labels: self.labels.clone(),
            names: self.names.clone(),
        }
    }
}

/// Attaches `names` (given in [`MergeTree::leaves`] order) to the leaves of
/// `t`. Label indices follow the sorted order of names, not input order.
pub fn label_tree<S: AsRef<str>>(t: &MergeTree, names: &[S]) -> Result<PhyloTree, TreeError> {
    let leaves = t.leaves();
    if names.len() != leaves.len() {
        return Err(TreeError::LabelCountMismatch {
            expected: leaves.len(),
            got: names.len(),
        });
    }
    let mut seen = HashSet::with_capacity(names.len());
    for name in names {
        let name = name.as_ref();
        if name.is_empty() {
            return Err(TreeError::EmptyLabel);
        }
        if !seen.insert(name) {
            return Err(TreeError::DuplicateLabel(name.to_owned()));
        }
    }
    let mut raw = t.to_raw();
    for (leaf, name) in leaves.iter().zip(names) {
        raw[leaf.0].name = Some(name.as_ref().to_owned());
    }
    PhyloTree::from_named(MergeTree::build(&raw)?)
}
