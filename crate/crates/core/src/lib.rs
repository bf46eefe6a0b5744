//! Labeled merge trees, their cophenetic vectors, and the interleaving
//! distance they induce.
//!
//! The `l∞` distance between cophenetic vectors of two trees with the same
//! leaf names equals the interleaving distance of the trees under the
//! smoothing flow. [`flow`] computes the latter by bisection so the two can
//! be checked against each other.
//!
//! ```
//! use phylo_core::{cophenetic_of, linf_distance, parse_newick, to_phylo, HeightConvention};
//!
//! let trees = parse_newick("((A:1,B:1):1,C:2):0; ((A:1,C:1):1,B:2):0;").unwrap();
//! let a = to_phylo(&trees[0], HeightConvention::DepthNegative).unwrap();
//! let b = to_phylo(&trees[1], HeightConvention::DepthNegative).unwrap();
//! let d = linf_distance(&cophenetic_of(&a), &cophenetic_of(&b)).unwrap();
//! assert_eq!(d, 1.0);
//! ```

pub mod cophenetic;
pub mod flow;
pub mod lca;
pub mod newick;
pub mod random;
pub mod tree;

pub use cophenetic::{
    cophenetic_of, cophenetic_vector, hom_exists, linf_distance, lp_distance, CopheneticError,
    CopheneticVector, Norm,
};
pub use flow::{
    interleaving_distance, is_interleaved, phtree_distance_closed_form, smooth, FlowError,
    InterleavingCertificate, Order, PhTreePoset, PosetWithFlow, RealSpace, RnPoint,
    DEFAULT_TOLERANCE,
};
pub use lca::LcaIndex;
pub use newick::{
    detect_convention, parse_newick, parse_newick_bytes, serialize, to_phylo, HeightConvention,
    NewickError, NewickNode,
};
pub use tree::{label_tree, MergeTree, Monotonicity, Node, NodeId, PhyloTree, RawNode, TreeError};
