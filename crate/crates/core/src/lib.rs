//! Binary normal/abnormal classification of Bengali sentences.
//!
//! The pipeline cleans raw text ([`corpus::clean_text`]), splits it into word
//! tokens ([`tokenize::tokenize`]), encodes tokens as count or TF-IDF vectors
//! against a training vocabulary ([`vectorize`]), and classifies them with
//! multinomial naive Bayes ([`nb`]) or a kernel SVM trained by SMO ([`svm`]).
//! [`evaluate`] measures accuracy, precision, recall and F1 on a held-out
//! split and runs grid searches; [`persist`] stores a fitted pipeline as one
//! JSON file.
//!
//! ```no_run
//! use abnormality::corpus::{load_corpus, split_corpus};
//! use abnormality::evaluate::evaluate_pipeline;
//! use abnormality::pipeline::ClassifierConfig;
//! use abnormality::sparse::FeatureKind;
//! use abnormality::svm::{KernelSpec, SolverConfig};
//! use abnormality::vectorize::FeatureConfig;
//!
//! let corpus = load_corpus("data.tsv")?;
//! let split = split_corpus(&corpus, 0.7, 42)?;
//! let svm = ClassifierConfig::Svm { c: 1.0, kernel: KernelSpec::rbf(1.0), solver: SolverConfig::default() };
//! let report = evaluate_pipeline(&corpus, &split, &FeatureConfig::new(FeatureKind::Tfidf), &svm)?;
//! println!("accuracy {:.3}  f1 {:.3}", report.accuracy, report.f1);
//! # Ok::<(), abnormality::Error>(())
//! ```

pub mod corpus;
pub mod evaluate;
pub mod nb;
pub mod persist;
pub mod pipeline;
pub mod sparse;
pub mod svm;
pub mod tokenize;
pub mod vectorize;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Vectorize(#[from] vectorize::VectorizeError),
    #[error(transparent)]
    Sparse(#[from] sparse::SparseError),
    #[error(transparent)]
    Nb(#[from] nb::NbError),
    #[error(transparent)]
    Svm(#[from] svm::SvmError),
    #[error(transparent)]
    Metrics(#[from] evaluate::MetricsError),
    #[error(transparent)]
    Persist(#[from] persist::PersistError),
    #[error("invalid split: {0}")]
    Split(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
