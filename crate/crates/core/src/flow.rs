//! Interleaving distances on posets with a flow.
//!
//! In a poset there is at most one morphism between two objects, so a pair
//! `x -> shift(y, eps)`, `y -> shift(x, eps)` is already an interleaving and no
//! coherence diagrams need checking. The engine here only needs the order
//! test and the shift. Flows are strict: `shift(a, 0) == a` and shifts
//! compose additively.
//!
//! Two instances are provided: [`RealSpace`] (points of `R^n` under the
//! componentwise order) and [`PhTreePoset`] (labeled merge trees, ordered by
//! morphism existence and shifted by [`smooth`]).

use serde::Serialize;
use thiserror::Error;

use crate::cophenetic::{
    check_aligned, cophenetic_of, linf_distance, CopheneticError, CopheneticVector,
};
use crate::tree::PhyloTree;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("epsilon must be finite and >= 0, got {0}")]
    NegativeEpsilon(f64),
    #[error("tolerance must be finite and > 0, got {0}")]
    InvalidTolerance(f64),
    #[error("search ceiling must be finite and >= 0, got {0}")]
    InvalidCeiling(f64),
}

fn check_epsilon(eps: f64) -> Result<(), FlowError> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(FlowError::NegativeEpsilon(eps))
    }
}

/// Topological smoothing of a merge tree: every height drops by `eps`; shape
/// and labels are unchanged.
pub fn smooth(t: &PhyloTree, eps: f64) -> Result<PhyloTree, FlowError> {
    check_epsilon(eps)?;
    Ok(t.with_tree(t.tree().map_heights(|h| h - eps)))
}

pub trait PosetWithFlow {
    type Object;
    type Witness;

    /// Evidence that `a <= b`, or `None` if there is no morphism `a -> b`.
    fn morphism(&self, a: &Self::Object, b: &Self::Object) -> Option<Self::Witness>;

    fn leq(&self, a: &Self::Object, b: &Self::Object) -> bool {
        self.morphism(a, b).is_some()
    }

    /// The translation `F_eps`. Callers guarantee `eps >= 0`.
    fn shift(&self, a: &Self::Object, eps: f64) -> Self::Object;
}

#[derive(Debug, Clone, Serialize)]
pub struct InterleavingCertificate<W> {
    pub epsilon: f64,
    /// Witness for `x -> F_eps(y)`.
    pub forward: W,
    /// Witness for `y -> F_eps(x)`.
    pub backward: W,
}

pub fn is_interleaved<P: PosetWithFlow>(
    p: &P,
    x: &P::Object,
    y: &P::Object,
    eps: f64,
) -> Option<InterleavingCertificate<P::Witness>> {
    if !(eps.is_finite() && eps >= 0.0) {
        return None;
    }
    let forward = p.morphism(x, &p.shift(y, eps))?;
    let backward = p.morphism(y, &p.shift(x, eps))?;
    Some(InterleavingCertificate {
        epsilon: eps,
        forward,
        backward,
    })
}

fn interleaved<P: PosetWithFlow>(p: &P, x: &P::Object, y: &P::Object, eps: f64) -> bool {
    p.leq(x, &p.shift(y, eps)) && p.leq(y, &p.shift(x, eps))
}

/// Smallest `eps` in `[0, eps_max]` admitting an interleaving, found by
/// bisection to within `tol`. Returns `f64::INFINITY` if `x` and `y` are not
/// interleaved at `eps_max`.
///
/// The infimum is attained in both provided instances, so the returned value
/// always carries a certificate.
pub fn interleaving_distance<P: PosetWithFlow>(
    p: &P,
    x: &P::Object,
    y: &P::Object,
    tol: f64,
    eps_max: f64,
) -> Result<f64, FlowError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(FlowError::InvalidTolerance(tol));
    }
    if !(eps_max.is_finite() && eps_max >= 0.0) {
        return Err(FlowError::InvalidCeiling(eps_max));
    }
    if interleaved(p, x, y, 0.0) {
        return Ok(0.0);
    }
    if !interleaved(p, x, y, eps_max) {
        return Ok(f64::INFINITY);
    }
    // Half the tolerance leaves room for rounding in the shifted comparisons.
    let (mut lo, mut hi) = (0.0f64, eps_max);
    while hi - lo > 0.5 * tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if interleaved(p, x, y, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Direction of the order on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    /// `a <= b` componentwise; the flow shifts upward.
    #[default]
    Leq,
    /// `a >= b` componentwise; the flow shifts downward.
    Geq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RnPoint(pub Vec<f64>);

#[derive(Debug, Clone, Copy, Default)]
pub struct RealSpace {
    pub order: Order,
}

impl RealSpace {
    pub fn new(order: Order) -> Self {
        RealSpace { order }
    }

    /// `||a - b||_inf + 1`, a ceiling that always brackets the distance.
    pub fn ceiling(a: &RnPoint, b: &RnPoint) -> f64 {
        linf(&a.0, &b.0) + 1.0
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

impl PosetWithFlow for RealSpace {
    type Object = RnPoint;
    /// Per-coordinate slack of the comparison, all nonnegative.
    type Witness = Vec<f64>;

    fn morphism(&self, a: &RnPoint, b: &RnPoint) -> Option<Vec<f64>> {
        if a.0.len() != b.0.len() {
            return None;
        }
        let slack: Vec<f64> = match self.order {
            Order::Leq => a.0.iter().zip(&b.0).map(|(x, y)| y - x).collect(),
            Order::Geq => a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect(),
        };
        slack.iter().all(|&s| s >= 0.0).then_some(slack)
    }

    fn shift(&self, a: &RnPoint, eps: f64) -> RnPoint {
        RnPoint(match self.order {
            Order::Leq => a.0.iter().map(|x| x + eps).collect(),
            Order::Geq => a.0.iter().map(|x| x - eps).collect(),
        })
    }
}

/// Entrywise slack `C(source) - C(target)` as upper-triangular rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CopheneticWitness {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CopheneticWitness {
    fn between(a: &CopheneticVector, b: &CopheneticVector) -> CopheneticWitness {
        let rows = a
            .rows()
            .iter()
            .zip(b.rows())
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
            .collect();
        CopheneticWitness {
            labels: a.names().to_vec(),
            rows,
        }
    }
}

/// Phylogenetic trees with a fixed label set. `a <= b` iff a label- and
/// height-preserving map `a -> b` exists, decided on cophenetic vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhTreePoset;

impl PhTreePoset {
    /// Closed-form distance plus one.
    pub fn ceiling(a: &PhyloTree, b: &PhyloTree) -> Result<f64, CopheneticError> {
        Ok(phtree_distance_closed_form(a, b)? + 1.0)
    }
}

impl PosetWithFlow for PhTreePoset {
    type Object = PhyloTree;
    type Witness = CopheneticWitness;

    fn morphism(&self, a: &PhyloTree, b: &PhyloTree) -> Option<CopheneticWitness> {
        check_aligned(a.names(), b.names()).ok()?;
        let (ca, cb) = (cophenetic_of(a), cophenetic_of(b));
        let w = CopheneticWitness::between(&ca, &cb);
        w.rows.iter().flatten().all(|&s| s >= 0.0).then_some(w)
    }

    fn shift(&self, a: &PhyloTree, eps: f64) -> PhyloTree {
        a.with_tree(a.tree().map_heights(|h| h - eps))
    }
}

/// `max_{i <= j} |f(l(i) ∨ l(j)) - g(m(i) ∨ m(j))|`, computed in `O(n^2)`.
pub fn phtree_distance_closed_form(a: &PhyloTree, b: &PhyloTree) -> Result<f64, CopheneticError> {
    check_aligned(a.names(), b.names())?;
    linf_distance(&cophenetic_of(a), &cophenetic_of(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{MergeTree, RawNode};

    fn cherry(a: f64, b: f64, root: f64) -> PhyloTree {
        PhyloTree::from_named(
            MergeTree::build(&[
                RawNode::new(root, None),
                RawNode::named(a, Some(0), "A"),
                RawNode::named(b, Some(0), "B"),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn smooth_laws() {
        let t = cherry(0.5, 0.25, 2.0);
        assert_eq!(smooth(&t, 0.0).unwrap(), t);
        assert_eq!(
            smooth(&smooth(&t, 0.5).unwrap(), 0.25).unwrap(),
            smooth(&t, 0.75).unwrap()
        );
        assert_eq!(
            cophenetic_of(&smooth(&t, 0.5).unwrap()),
            cophenetic_of(&t).shift_down(0.5)
        );
        assert_eq!(smooth(&t, -1.0), Err(FlowError::NegativeEpsilon(-1.0)));
        assert!(smooth(&t, f64::NAN).is_err());
    }

    #[test]
    fn r2_example() {
        let rs = RealSpace::default();
        let x = RnPoint(vec![0.0, 0.0]);
        let y = RnPoint(vec![3.0, 1.0]);
        assert!(is_interleaved(&rs, &x, &y, 2.0).is_none());
        let cert = is_interleaved(&rs, &x, &y, 3.0).unwrap();
        assert_eq!(cert.epsilon, 3.0);
        assert_eq!(cert.forward, vec![6.0, 4.0]);
        assert_eq!(cert.backward, vec![0.0, 2.0]);
        assert!(is_interleaved(&rs, &x, &x, 0.0).is_some());
        let d = interleaving_distance(&rs, &x, &y, 1e-9, RealSpace::ceiling(&x, &y)).unwrap();
        assert!((d - 3.0).abs() <= 1e-9);
        let geq = RealSpace::new(Order::Geq);
        let d = interleaving_distance(&geq, &x, &y, 1e-9, 10.0).unwrap();
        assert!((d - 3.0).abs() <= 1e-9);
    }

    #[test]
    fn engine_edge_cases() {
        let rs = RealSpace::default();
        let x = RnPoint(vec![0.0]);
        let y = RnPoint(vec![5.0]);
        assert_eq!(interleaving_distance(&rs, &x, &x, 1e-9, 1.0), Ok(0.0));
        assert_eq!(interleaving_distance(&rs, &x, &y, 1e-9, 4.0), Ok(f64::INFINITY));
        assert_eq!(
            interleaving_distance(&rs, &x, &y, 0.0, 4.0),
            Err(FlowError::InvalidTolerance(0.0))
        );
        assert!(matches!(
            interleaving_distance(&rs, &x, &y, 1e-9, f64::INFINITY),
            Err(FlowError::InvalidCeiling(_))
        ));
        assert!(is_interleaved(&rs, &x, &y, -1.0).is_none());
    }

    #[test]
    fn tree_against_its_smoothing() {
        let t = cherry(0.5, 0.25, 2.0);
        let s = smooth(&t, 1.5).unwrap();
        assert_eq!(phtree_distance_closed_form(&t, &s).unwrap(), 1.5);
        assert!(PhTreePoset.leq(&t, &s));
        assert!(!PhTreePoset.leq(&s, &t));
        let d = interleaving_distance(&PhTreePoset, &t, &s, 1e-9, 3.0).unwrap();
        assert!((d - 1.5).abs() <= 1e-9);
    }

    #[test]
    fn mismatched_labels() {
        let a = cherry(0.0, 0.0, 1.0);
        let b = PhyloTree::from_named(
            MergeTree::build(&[
                RawNode::new(1.0, None),
                RawNode::named(0.0, Some(0), "A"),
                RawNode::named(0.0, Some(0), "C"),
            ])
            .unwrap(),
        )
        .unwrap();
        assert!(matches!(
            phtree_distance_closed_form(&a, &b),
            Err(CopheneticError::LabelSetMismatch { .. })
        ));
        assert!(!PhTreePoset.leq(&a, &b));
    }
}
