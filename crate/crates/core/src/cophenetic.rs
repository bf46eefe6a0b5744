//! Cophenetic vectors and the distances built on them.
//!
//! The cophenetic vector of a tree with `n` labeled leaves lists the height of
//! `leaf(i) ∨ leaf(j)` for every `0 <= i <= j < n`. The diagonal is included,
//! so leaf heights take part in every distance computed here; some other
//! cophenetic-metric tools drop it.
//!
//! Only [`linf_distance`] is an interleaving distance. [`lp_distance`] with
//! `p = 1` or `p = 2` is provided as a convenience and carries no such
//! guarantee.

use serde::Serialize;
use thiserror::Error;

use crate::lca::LcaIndex;
use crate::tree::PhyloTree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CopheneticError {
    #[error("leaf counts differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("leaf label sets differ (first difference at label {index}: {left:?} vs {right:?})")]
    LabelSetMismatch {
        index: usize,
        left: String,
        right: String,
    },
}

/// Upper-triangular array of join heights, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CopheneticVector {
    n: usize,
    entries: Vec<f64>,
    names: Vec<String>,
}

/// Flat offset of `(i, j)`, `i <= j < n`, 0-based.
#[inline]
pub fn offset(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

impl CopheneticVector {
    /// Builds a vector directly from entries in row-major upper-triangular
    /// order.
    pub fn from_entries(names: Vec<String>, entries: Vec<f64>) -> Option<CopheneticVector> {
        let n = names.len();
        (entries.len() == n * (n + 1) / 2).then_some(CopheneticVector { n, entries, names })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entry for labels `i`, `j` in either order.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.entries[offset(self.n, i, j)]
    }

    /// Upper-triangular rows: row `i` holds entries `(i, i..n)`.
    pub fn rows(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(self.n);
        let mut start = 0;
        for i in 0..self.n {
            let len = self.n - i;
            out.push(&self.entries[start..start + len]);
            start += len;
        }
        out
    }

    /// Every entry decreased by `eps`.
    pub fn shift_down(&self, eps: f64) -> CopheneticVector {
        CopheneticVector {
            n: self.n,
            entries: self.entries.iter().map(|&x| x - eps).collect(),
            names: self.names.clone(),
        }
    }

    pub fn to_json(&self) -> VectorJson<'_> {
        VectorJson {
            labels: &self.names,
            rows: self.rows(),
        }
    }

    /// `i,j,label_i,label_j,height` with 1-based indices and a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,label_i,label_j,height\n");
        for i in 0..self.n {
            for j in i..self.n {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    i + 1,
                    j + 1,
                    csv_field(&self.names[i]),
                    csv_field(&self.names[j]),
                    self.get(i, j)
                ));
            }
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct VectorJson<'a> {
    pub labels: &'a [String],
    pub rows: Vec<&'a [f64]>,
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Cophenetic vector of `t`; `idx` must be built from `t.tree()`.
pub fn cophenetic_vector(t: &PhyloTree, idx: &LcaIndex) -> CopheneticVector {
    let n = t.n();
    let tree = t.tree();
    let leaves = t.labels();
    let mut entries = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let li = leaves[i];
        entries.extend(leaves[i..].iter().map(|&lj| tree.height(idx.join(li, lj))));
    }
    CopheneticVector {
        n,
        entries,
        names: t.names().to_vec(),
    }
}

/// Convenience wrapper that builds the index itself.
pub fn cophenetic_of(t: &PhyloTree) -> CopheneticVector {
    cophenetic_vector(t, &LcaIndex::build(t.tree()))
}

pub(crate) fn check_aligned(a: &[String], b: &[String]) -> Result<(), CopheneticError> {
    if a.len() != b.len() {
        return Err(CopheneticError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(index) => Err(CopheneticError::LabelSetMismatch {
            index,
            left: a[index].clone(),
            right: b[index].clone(),
        }),
        None => Ok(()),
    }
}

pub fn linf_distance(a: &CopheneticVector, b: &CopheneticVector) -> Result<f64, CopheneticError> {
    check_aligned(&a.names, &b.names)?;
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl std::str::FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            "inf" | "infinity" | "∞" => Ok(Norm::LInf),
            other => Err(format!("unsupported norm {other:?}; expected 1, 2 or inf")),
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::LInf => "linf",
        })
    }
}

pub fn lp_distance(
    a: &CopheneticVector,
    b: &CopheneticVector,
    p: Norm,
) -> Result<f64, CopheneticError> {
    check_aligned(&a.names, &b.names)?;
    let diffs = a.entries.iter().zip(&b.entries).map(|(x, y)| (x - y).abs());
    Ok(match p {
        Norm::L1 => diffs.sum(),
        Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        Norm::LInf => return linf_distance(a, b),
    })
}

/// Whether a label- and height-preserving map from the tree of `a` to the tree
/// of `b` exists. That holds exactly when `a >= b` entrywise.
pub fn hom_exists(a: &CopheneticVector, b: &CopheneticVector) -> Result<bool, CopheneticError> {
    check_aligned(&a.names, &b.names)?;
    Ok(a.entries.iter().zip(&b.entries).all(|(x, y)| x >= y))
}
