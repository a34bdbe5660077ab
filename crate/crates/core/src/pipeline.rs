//! Clean → tokenize → vectorize → classify, fitted as one unit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{clean_text, Document, Label};
use crate::nb::{nb_fit, NbModel};
use crate::sparse::{FeatureMatrix, SparseVector};
use crate::svm::{svm_fit, KernelSpec, SolverConfig, SvmModel};
use crate::tokenize::{tokenize, TokenSeq};
use crate::vectorize::{FeatureConfig, FeatureExtractor};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Nb,
    Svm,
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::Nb => "nb",
            ClassifierKind::Svm => "svm",
        })
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "nb" | "naive-bayes" => Ok(ClassifierKind::Nb),
            "svm" => Ok(ClassifierKind::Svm),
            other => Err(format!("unknown classifier `{other}` (expected nb or svm)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClassifierConfig {
    Nb {
        alpha: f64,
        fit_prior: bool,
    },
    Svm {
        c: f64,
        kernel: KernelSpec,
        solver: SolverConfig,
    },
}

impl ClassifierConfig {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierConfig::Nb { .. } => ClassifierKind::Nb,
            ClassifierConfig::Svm { .. } => ClassifierKind::Svm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClassifierModel {
    Nb(NbModel),
    Svm(SvmModel),
}

impl ClassifierModel {
    pub fn dim(&self) -> usize {
        match self {
            ClassifierModel::Nb(m) => m.n_features,
            ClassifierModel::Svm(m) => m.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClassifierModel::Nb(m) => {
                m.validate()?;
                if m.n_classes() != Label::ALL.len() {
                    return Err(Error::Nb(crate::nb::NbError::Invalid(format!(
                        "expected 2 classes, found {}",
                        m.n_classes()
                    ))));
                }
            }
            ClassifierModel::Svm(m) => m.validate()?,
        }
        Ok(())
    }

    /// Signed score where positive leans abnormal: the log-posterior
    /// difference for NB, the decision value for SVM.
    pub fn score(&self, x: &SparseVector) -> Result<f64> {
        Ok(match self {
            ClassifierModel::Nb(m) => {
                let s = m.log_posterior(x)?;
                s[Label::Abnormal.index()] - s[Label::Normal.index()]
            }
            ClassifierModel::Svm(m) => m.decision(x)?,
        })
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Label> {
        Ok(match self {
            ClassifierModel::Nb(m) => m.predict(x)?,
            ClassifierModel::Svm(m) => m.predict(x)?,
        })
    }
}

pub fn fit_classifier(
    matrix: &FeatureMatrix,
    config: &ClassifierConfig,
) -> Result<ClassifierModel> {
    Ok(match config {
        ClassifierConfig::Nb { alpha, fit_prior } => {
            ClassifierModel::Nb(nb_fit(matrix, *alpha, *fit_prior)?)
        }
        ClassifierConfig::Svm { c, kernel, solver } => {
            ClassifierModel::Svm(svm_fit(matrix, *c, kernel, solver)?)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

/// A fitted feature extractor plus classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub features: FeatureExtractor,
    pub classifier: ClassifierModel,
}

pub fn tokenize_documents<'a>(docs: impl IntoIterator<Item = &'a Document>) -> Vec<TokenSeq> {
    docs.into_iter().map(|d| tokenize(&d.text)).collect()
}

impl Pipeline {
    /// Fits features and classifier on `train` only.
    pub fn fit(
        train: &[&Document],
        features: &FeatureConfig,
        classifier: &ClassifierConfig,
    ) -> Result<Pipeline> {
        let tokens = tokenize_documents(train.iter().copied());
        let extractor = FeatureExtractor::fit(&tokens, features)?;
        let labels = train.iter().map(|d| d.label).collect();
        let matrix = encode_tokens(&extractor, &tokens, labels)?;
        let classifier = fit_classifier(&matrix, classifier)?;
        Ok(Pipeline {
            features: extractor,
            classifier,
        })
    }

    pub fn encode(&self, text: &str) -> SparseVector {
        self.features.transform(&tokenize(&clean_text(text)))
    }

    pub fn predict_text(&self, text: &str) -> Result<Prediction> {
        let x = self.encode(text);
        Ok(Prediction {
            label: self.classifier.predict(&x)?,
            score: self.classifier.score(&x)?,
        })
    }
}

pub fn encode_tokens(
    extractor: &FeatureExtractor,
    tokens: &[TokenSeq],
    labels: Vec<Label>,
) -> Result<FeatureMatrix> {
    let rows = tokens.iter().map(|t| extractor.transform(t)).collect();
    Ok(FeatureMatrix::new(
        rows,
        labels,
        extractor.kind(),
        extractor.dim(),
    )?)
}
