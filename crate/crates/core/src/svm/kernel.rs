use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SvmError;
use crate::sparse::SparseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `x·z`
    Linear,
    /// `(γ x·z + r)²`
    Polynomial,
    /// `exp(−γ ‖x − z‖²)`
    Rbf,
    /// `tanh(γ x·z + γ)`: γ in both the slope and the offset.
    Sigmoid,
    /// `tanh(γ x·z + r)`
    SigmoidCoef0,
}

impl KernelKind {
    pub fn uses_gamma(self) -> bool {
        !matches!(self, KernelKind::Linear)
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Polynomial => "polynomial",
            KernelKind::Rbf => "rbf",
            KernelKind::Sigmoid => "sigmoid",
            KernelKind::SigmoidCoef0 => "sigmoid_coef0",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "linear" => Ok(KernelKind::Linear),
            "poly" | "polynomial" => Ok(KernelKind::Polynomial),
            "rbf" => Ok(KernelKind::Rbf),
            "sigmoid" => Ok(KernelKind::Sigmoid),
            "sigmoid_coef0" => Ok(KernelKind::SigmoidCoef0),
            other => Err(format!(
                "unknown kernel `{other}` (expected linear, polynomial, rbf, sigmoid or sigmoid-coef0)"
            )),
        }
    }
}

/// Kernel family plus its parameters. The polynomial degree is fixed at 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub gamma: f64,
    pub coef0: f64,
}

impl KernelSpec {
    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            gamma: 1.0,
            coef0: 0.0,
        }
    }

    pub fn rbf(gamma: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Rbf,
            gamma,
            coef0: 0.0,
        }
    }

    pub fn polynomial(gamma: f64, coef0: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Polynomial,
            gamma,
            coef0,
        }
    }

    pub fn sigmoid(gamma: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Sigmoid,
            gamma,
            coef0: 0.0,
        }
    }

    pub fn sigmoid_coef0(gamma: f64, coef0: f64) -> Self {
        KernelSpec {
            kind: KernelKind::SigmoidCoef0,
            gamma,
            coef0,
        }
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        if self.kind.uses_gamma() && !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(SvmError::InvalidGamma(self.gamma));
        }
        if !self.coef0.is_finite() {
            return Err(SvmError::InvalidKernel(format!(
                "coef0 must be finite, got {}",
                self.coef0
            )));
        }
        Ok(())
    }

    /// Evaluates without checking dimensions.
    pub(crate) fn eval_unchecked(&self, x: &SparseVector, z: &SparseVector) -> f64 {
        match self.kind {
            KernelKind::Linear => x.dot(z),
            KernelKind::Polynomial => {
                let t = self.gamma * x.dot(z) + self.coef0;
                t * t
            }
            KernelKind::Rbf => (-self.gamma * x.squared_distance(z)).exp(),
            KernelKind::Sigmoid => (self.gamma * x.dot(z) + self.gamma).tanh(),
            KernelKind::SigmoidCoef0 => (self.gamma * x.dot(z) + self.coef0).tanh(),
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &SparseVector, z: &SparseVector) -> Result<f64, SvmError> {
    if x.dim() != z.dim() {
        return Err(SvmError::DimensionMismatch {
            expected: x.dim(),
            found: z.dim(),
        });
    }
    Ok(spec.eval_unchecked(x, z))
}
