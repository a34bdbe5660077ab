//! Binary kernel SVM.
//!
//! Labels map to targets as normal → −1, abnormal → +1, so a positive
//! decision value means abnormal. The decision function is
//! `f(x) = Σ_i y_i α_i K(x, x_i) + b` over the retained support vectors.

mod kernel;
mod solver;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;
use crate::sparse::{FeatureMatrix, SparseVector};

pub use kernel::{kernel_eval, KernelKind, KernelSpec};
pub use solver::{solve_dual, DualSolution, KktReport, SolverConfig};

#[derive(Debug, Error, PartialEq)]
pub enum SvmError {
    #[error("box constraint C must be positive and finite, got {0}")]
    InvalidC(f64),
    #[error("kernel gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("training data must contain both classes")]
    SingleClass,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(
        "solver stopped after {} iterations without meeting the KKT tolerance \
         (gap {:.3e}, worst residual {:.3e} at point {})",
        .0.iterations, .0.gap, .0.kkt.max_residual, .0.kkt.worst_index
    )]
    NotConverged(Box<DualSolution>),
    #[error("invalid SVM model: {0}")]
    Invalid(String),
}

impl SvmError {
    /// The last iterate when the iteration budget ran out.
    pub fn best_iterate(&self) -> Option<&DualSolution> {
        match self {
            SvmError::NotConverged(sol) => Some(sol),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<SparseVector>,
    /// `y_i α_i` per support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub c: f64,
    pub dim: usize,
}

pub fn target(label: Label) -> f64 {
    match label {
        Label::Normal => -1.0,
        Label::Abnormal => 1.0,
    }
}

/// Trains on a feature matrix and also returns the full dual solution.
pub fn svm_fit_with_solution(
    matrix: &FeatureMatrix,
    c: f64,
    kernel: &KernelSpec,
    config: &SolverConfig,
) -> Result<(SvmModel, DualSolution), SvmError> {
    let y: Vec<f64> = matrix.labels().iter().map(|&l| target(l)).collect();
    let solution = solve_dual(matrix.rows(), &y, c, kernel, config)?;
    let mut support_vectors = Vec::new();
    let mut dual_coef = Vec::new();
    for (k, &a) in solution.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(matrix.rows()[k].clone());
            dual_coef.push(y[k] * a);
        }
    }
    let model = SvmModel {
        support_vectors,
        dual_coef,
        bias: solution.bias,
        kernel: *kernel,
        c,
        dim: matrix.dim(),
    };
    Ok((model, solution))
}

pub fn svm_fit(
    matrix: &FeatureMatrix,
    c: f64,
    kernel: &KernelSpec,
    config: &SolverConfig,
) -> Result<SvmModel, SvmError> {
    svm_fit_with_solution(matrix, c, kernel, config).map(|(m, _)| m)
}

impl SvmModel {
    /// Pre-sign decision value `Σ dual_coef_i K(x, sv_i) + b`.
    pub fn decision(&self, x: &SparseVector) -> Result<f64, SvmError> {
        if x.dim() != self.dim {
            return Err(SvmError::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        let sum: f64 = self
            .support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, coef)| coef * self.kernel.eval_unchecked(x, sv))
            .sum();
        Ok(sum + self.bias)
    }

    /// Positive decision → abnormal; zero or negative → normal.
    pub fn predict(&self, x: &SparseVector) -> Result<Label, SvmError> {
        Ok(label_for_decision(self.decision(x)?))
    }

    /// Checks the box constraint, the balance constraint `Σ y_i α_i = 0`
    /// (within 1e-8) and shapes.
    pub fn validate(&self) -> Result<(), SvmError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(SvmError::InvalidC(self.c));
        }
        self.kernel.validate()?;
        if self.support_vectors.len() != self.dual_coef.len() {
            return Err(SvmError::Invalid(
                "support vector and coefficient counts differ".into(),
            ));
        }
        if self.support_vectors.is_empty() {
            return Err(SvmError::Invalid("model has no support vectors".into()));
        }
        if let Some(sv) = self.support_vectors.iter().find(|sv| sv.dim() != self.dim) {
            return Err(SvmError::DimensionMismatch {
                expected: self.dim,
                found: sv.dim(),
            });
        }
        if !self.bias.is_finite() {
            return Err(SvmError::Invalid("bias is not finite".into()));
        }
        for &coef in &self.dual_coef {
            let a = coef.abs();
            if !(a > 0.0 && a <= self.c) {
                return Err(SvmError::Invalid(format!(
                    "dual coefficient {coef} violates 0 < alpha <= C = {}",
                    self.c
                )));
            }
        }
        let balance: f64 = self.dual_coef.iter().sum();
        if balance.abs() > 1e-8 {
            return Err(SvmError::Invalid(format!(
                "sum of y_i alpha_i is {balance}, expected 0"
            )));
        }
        Ok(())
    }
}

pub fn label_for_decision(value: f64) -> Label {
    if value > 0.0 {
        Label::Abnormal
    } else {
        Label::Normal
    }
}
