//! Multinomial naive Bayes with additive smoothing.
//!
//! For class `c` and feature `i`, `N_ci` is the summed feature value over the
//! class's training rows and `N_c = Σ_i N_ci`. The smoothed estimate is
//! `θ_ci = (N_ci + α) / (N_c + α·n)` with `n` the number of features; `α = 1`
//! is Laplace smoothing and `α < 1` Lidstone. Prediction maximizes
//! `log P(c) + Σ_i x_i · log θ_ci`, so feature values act as (possibly
//! fractional) event multiplicities. Everything is kept in log space.
//!
//! The model works with any number of classes internally; [`nb_fit`] trains
//! the binary normal/abnormal problem.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;
use crate::sparse::{FeatureMatrix, SparseVector};

/// Scores closer than this (relative to their magnitude) are ties, resolved
/// toward the lower class index. Exact ties in real arithmetic can land a
/// few ulps apart after summation in floating point.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum NbError {
    #[error("smoothing prior alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("training matrix is empty")]
    EmptyMatrix,
    #[error("class {0} has no training rows")]
    EmptyClass(usize),
    #[error("feature values must be nonnegative and finite (row {row}, column {column})")]
    InvalidFeature { row: usize, column: usize },
    #[error("dimension mismatch: model has {expected} features, input has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("NB normalization invariant violated: {0}")]
    Normalization(String),
    #[error("invalid naive Bayes model: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub class_log_prior: Vec<f64>,
    /// `[class][feature]` log θ.
    pub feature_log_prob: Vec<Vec<f64>>,
    pub alpha: f64,
    pub fit_prior: bool,
    pub n_features: usize,
}

/// Trains on `rows` with class indices `classes` in `0..n_classes`.
pub fn nb_fit_classes(
    rows: &[SparseVector],
    classes: &[usize],
    n_classes: usize,
    n_features: usize,
    alpha: f64,
    fit_prior: bool,
) -> Result<NbModel, NbError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(NbError::InvalidAlpha(alpha));
    }
    if rows.is_empty() {
        return Err(NbError::EmptyMatrix);
    }
    if classes.len() != rows.len() || classes.iter().any(|&c| c >= n_classes) {
        return Err(NbError::Invalid(format!(
            "{} class indices in 0..{n_classes} required for {} rows",
            rows.len(),
            rows.len()
        )));
    }
    let mut class_rows = vec![0usize; n_classes];
    let mut totals = vec![vec![0.0f64; n_features]; n_classes];
    for (r, (row, &c)) in rows.iter().zip(classes).enumerate() {
        if row.dim() != n_features {
            return Err(NbError::DimensionMismatch {
                expected: n_features,
                found: row.dim(),
            });
        }
        class_rows[c] += 1;
        for &(i, v) in row.entries() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(NbError::InvalidFeature { row: r, column: i });
            }
            totals[c][i] += v;
        }
    }
    if let Some(c) = class_rows.iter().position(|&k| k == 0) {
        return Err(NbError::EmptyClass(c));
    }

    let n = rows.len() as f64;
    let class_log_prior = class_rows
        .iter()
        .map(|&k| {
            if fit_prior {
                (k as f64 / n).ln()
            } else {
                (1.0 / n_classes as f64).ln()
            }
        })
        .collect();
    let feature_log_prob = totals
        .iter()
        .map(|counts| {
            let class_total: f64 = counts.iter().sum();
            let denom = (class_total + alpha * n_features as f64).ln();
            counts
                .iter()
                .map(|&nci| (nci + alpha).ln() - denom)
                .collect()
        })
        .collect();
    Ok(NbModel {
        class_log_prior,
        feature_log_prob,
        alpha,
        fit_prior,
        n_features,
    })
}

/// Trains the binary normal/abnormal model. Both classes must be present.
pub fn nb_fit(matrix: &FeatureMatrix, alpha: f64, fit_prior: bool) -> Result<NbModel, NbError> {
    let classes: Vec<usize> = matrix.labels().iter().map(|l| l.index()).collect();
    nb_fit_classes(
        matrix.rows(),
        &classes,
        Label::ALL.len(),
        matrix.dim(),
        alpha,
        fit_prior,
    )
}

impl NbModel {
    pub fn n_classes(&self) -> usize {
        self.class_log_prior.len()
    }

    /// Unnormalized per-class log scores `log P(c) + Σ x_i log θ_ci`.
    pub fn log_posterior(&self, x: &SparseVector) -> Result<Vec<f64>, NbError> {
        if x.dim() != self.n_features {
            return Err(NbError::DimensionMismatch {
                expected: self.n_features,
                found: x.dim(),
            });
        }
        Ok(self
            .class_log_prior
            .iter()
            .zip(&self.feature_log_prob)
            .map(|(prior, logp)| prior + x.entries().iter().map(|&(i, v)| v * logp[i]).sum::<f64>())
            .collect())
    }

    /// Index of the best class; near-exact ties go to the lower index.
    pub fn predict_class(&self, x: &SparseVector) -> Result<usize, NbError> {
        let scores = self.log_posterior(x)?;
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate().skip(1) {
            let top = scores[best];
            let scale = top.abs().max(s.abs()).max(1.0);
            if s - top > TIE_TOLERANCE * scale {
                best = c;
            }
        }
        Ok(best)
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Label, NbError> {
        let c = self.predict_class(x)?;
        Label::from_index(c)
            .ok_or_else(|| NbError::Invalid(format!("class index {c} is not a binary label")))
    }

    /// Checks shapes, finiteness and that priors and every θ row sum to 1
    /// within 1e-9.
    pub fn validate(&self) -> Result<(), NbError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(NbError::InvalidAlpha(self.alpha));
        }
        if self.class_log_prior.len() != self.feature_log_prob.len()
            || self.class_log_prior.is_empty()
        {
            return Err(NbError::Invalid("class count mismatch".into()));
        }
        let all = self
            .class_log_prior
            .iter()
            .chain(self.feature_log_prob.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(NbError::Invalid("non-finite log probability".into()));
        }
        let prior_mass: f64 = self.class_log_prior.iter().map(|v| v.exp()).sum();
        if (prior_mass - 1.0).abs() > 1e-9 {
            return Err(NbError::Normalization(format!(
                "class priors sum to {prior_mass}"
            )));
        }
        for (c, row) in self.feature_log_prob.iter().enumerate() {
            if row.len() != self.n_features {
                return Err(NbError::Invalid(format!(
                    "class {c} has {} feature weights, expected {}",
                    row.len(),
                    self.n_features
                )));
            }
            let mass: f64 = row.iter().map(|v| v.exp()).sum();
            if (mass - 1.0).abs() > 1e-9 {
                return Err(NbError::Normalization(format!(
                    "class {c} feature probabilities sum to {mass}"
                )));
            }
        }
        Ok(())
    }
}
