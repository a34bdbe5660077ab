//! Sparse feature vectors and labeled feature matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;

#[derive(Debug, Error, PartialEq)]
pub enum SparseError {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("duplicate index {0}")]
    DuplicateIndex(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("zero value stored at index {0}")]
    StoredZero(usize),
    #[error("indices not strictly increasing at {0}")]
    Unsorted(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{rows} rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
}

/// Vector over `dim` columns storing only nonzero entries, sorted by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSparseVector")]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

#[derive(Deserialize)]
struct RawSparseVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl TryFrom<RawSparseVector> for SparseVector {
    type Error = SparseError;

    fn try_from(raw: RawSparseVector) -> Result<Self, SparseError> {
        for (k, &(i, v)) in raw.entries.iter().enumerate() {
            if i >= raw.dim {
                return Err(SparseError::IndexOutOfRange {
                    index: i,
                    dim: raw.dim,
                });
            }
            if !v.is_finite() {
                return Err(SparseError::NonFinite(i));
            }
            if v == 0.0 {
                return Err(SparseError::StoredZero(i));
            }
            if k > 0 && raw.entries[k - 1].0 >= i {
                return Err(SparseError::Unsorted(i));
            }
        }
        Ok(SparseVector {
            dim: raw.dim,
            entries: raw.entries,
        })
    }
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Builds a vector from unordered `(index, value)` pairs. Zeros are
    /// dropped; duplicates, out-of-range indices and non-finite values are
    /// rejected.
    pub fn from_entries(
        dim: usize,
        entries: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self, SparseError> {
        let mut entries: Vec<(usize, f64)> =
            entries.into_iter().filter(|&(_, v)| v != 0.0).collect();
        entries.sort_unstable_by_key(|&(i, _)| i);
        for (k, &(i, v)) in entries.iter().enumerate() {
            if i >= dim {
                return Err(SparseError::IndexOutOfRange { index: i, dim });
            }
            if !v.is_finite() {
                return Err(SparseError::NonFinite(i));
            }
            if k > 0 && entries[k - 1].0 == i {
                return Err(SparseError::DuplicateIndex(i));
            }
        }
        Ok(SparseVector { dim, entries })
    }

    pub fn from_dense(values: &[f64]) -> Result<Self, SparseError> {
        Self::from_entries(values.len(), values.iter().copied().enumerate())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.entries[k].1)
            .unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    /// Reorders columns: entry `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SparseVector {
        let moved = self.entries.iter().map(|&(i, v)| (perm[i], v));
        SparseVector::from_entries(self.dim, moved).expect("permutation keeps indices valid")
    }

    /// Dot product over the merged index sets, accumulated in index order.
    /// Dimensions are not checked here.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// `‖self − other‖²`, summed directly over differences so that the
    /// distance of a vector to itself is exactly zero.
    pub fn squared_distance(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < a.len() || j < b.len() {
            let d = match (a.get(i), b.get(j)) {
                (Some(&(ia, va)), Some(&(ib, vb))) if ia == ib => {
                    i += 1;
                    j += 1;
                    va - vb
                }
                (Some(&(ia, va)), Some(&(ib, _))) if ia < ib => {
                    i += 1;
                    va
                }
                (Some(_), Some(&(_, vb))) => {
                    j += 1;
                    -vb
                }
                (Some(&(_, va)), None) => {
                    i += 1;
                    va
                }
                (None, Some(&(_, vb))) => {
                    j += 1;
                    -vb
                }
                (None, None) => unreachable!(),
            };
            acc += d * d;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Count,
    Tfidf,
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureKind::Count => "count",
            FeatureKind::Tfidf => "tfidf",
        })
    }
}

impl FromStr for FeatureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "count" => Ok(FeatureKind::Count),
            "tfidf" | "tf-idf" => Ok(FeatureKind::Tfidf),
            other => Err(format!(
                "unknown feature kind `{other}` (expected count or tfidf)"
            )),
        }
    }
}

/// Encoded documents with their labels. All rows share one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: Vec<SparseVector>,
    labels: Vec<Label>,
    kind: FeatureKind,
    dim: usize,
}

impl FeatureMatrix {
    pub fn new(
        rows: Vec<SparseVector>,
        labels: Vec<Label>,
        kind: FeatureKind,
        dim: usize,
    ) -> Result<Self, SparseError> {
        if rows.len() != labels.len() {
            return Err(SparseError::LabelCount {
                rows: rows.len(),
                labels: labels.len(),
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.dim() != dim) {
            return Err(SparseError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(FeatureMatrix {
            rows,
            labels,
            kind,
            dim,
        })
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
