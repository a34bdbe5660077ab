//! Vocabulary fitting plus count and TF-IDF encoding.
//!
//! TF is `count(t, d) / |d|` where `|d|` is the number of tokens in the
//! document (out-of-vocabulary tokens included). IDF is
//! `ln(n_docs / doc_freq(t))` over the training documents, and the TF-IDF
//! weight is their plain product with no smoothing or row normalization.
//! [`TfMode::Literal`] reads the TF denominator as the number of occurrences
//! of the term itself, which makes TF 1 for every present term.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sparse::{FeatureKind, SparseVector};
use crate::tokenize::TokenSeq;

#[derive(Debug, Error, PartialEq)]
pub enum VectorizeError {
    #[error("cannot fit a vocabulary: every training document is empty")]
    NoTerms,
    #[error("term frequency is undefined for an empty document")]
    EmptyDocument,
    #[error("term `{0}` is not in the vocabulary")]
    UnknownTerm(String),
    #[error("invalid vocabulary: {0}")]
    Invalid(String),
}

/// Sorted term dictionary with training document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVocabulary")]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

#[derive(Deserialize)]
struct RawVocabulary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl TryFrom<RawVocabulary> for Vocabulary {
    type Error = VectorizeError;

    fn try_from(raw: RawVocabulary) -> Result<Self, VectorizeError> {
        Vocabulary::from_parts(raw.terms, raw.doc_freq, raw.n_docs)
    }
}

impl Vocabulary {
    /// Rebuilds a vocabulary, checking sort order and frequency bounds.
    pub fn from_parts(
        terms: Vec<String>,
        doc_freq: Vec<usize>,
        n_docs: usize,
    ) -> Result<Self, VectorizeError> {
        if terms.len() != doc_freq.len() {
            return Err(VectorizeError::Invalid(format!(
                "{} terms but {} document frequencies",
                terms.len(),
                doc_freq.len()
            )));
        }
        if let Some(w) = terms.windows(2).find(|w| w[0] >= w[1]) {
            return Err(VectorizeError::Invalid(format!(
                "terms not strictly sorted at `{}`",
                w[1]
            )));
        }
        if let Some(k) = doc_freq.iter().position(|&df| df == 0 || df > n_docs) {
            return Err(VectorizeError::Invalid(format!(
                "document frequency {} of `{}` outside 1..={n_docs}",
                doc_freq[k], terms[k]
            )));
        }
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            terms,
            doc_freq,
            n_docs,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    /// Number of training documents the vocabulary was fitted on.
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_freq_of(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|i| self.doc_freq[i])
    }
}

/// Collects every distinct token of the training documents. `max_features`,
/// when set, keeps the top-K terms by document frequency (ties go to the
/// smaller term).
pub fn fit_vocabulary(
    train_docs: &[TokenSeq],
    max_features: Option<usize>,
) -> Result<Vocabulary, VectorizeError> {
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in train_docs {
        let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    if df.is_empty() {
        return Err(VectorizeError::NoTerms);
    }
    let mut kept: Vec<(&str, usize)> = df.into_iter().collect();
    if let Some(k) = max_features {
        if k < kept.len() {
            kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            kept.truncate(k.max(1));
            kept.sort_unstable_by(|a, b| a.0.cmp(b.0));
        }
    }
    let (terms, doc_freq): (Vec<String>, Vec<usize>) =
        kept.into_iter().map(|(t, d)| (t.to_owned(), d)).unzip();
    Vocabulary::from_parts(terms, doc_freq, train_docs.len())
}

fn in_vocab_counts(doc: &TokenSeq, vocab: &Vocabulary) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for tok in doc {
        if let Some(i) = vocab.index_of(tok) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    counts
}

/// Occurrence counts of in-vocabulary tokens; unknown tokens are ignored.
pub fn count_vectorize(doc: &TokenSeq, vocab: &Vocabulary) -> SparseVector {
    let entries = in_vocab_counts(doc, vocab)
        .into_iter()
        .map(|(i, c)| (i, c as f64));
    SparseVector::from_entries(vocab.len(), entries).expect("vocabulary indices are in range")
}

/// Relative frequency of `term` in `doc`.
pub fn term_frequency(term: &str, doc: &TokenSeq) -> Result<f64, VectorizeError> {
    if doc.is_empty() {
        return Err(VectorizeError::EmptyDocument);
    }
    let count = doc.iter().filter(|t| t.as_str() == term).count();
    Ok(count as f64 / doc.len() as f64)
}

/// `ln(n_docs / doc_freq(term))`.
pub fn inverse_document_frequency(
    term: &str,
    vocab: &Vocabulary,
    n_docs: usize,
) -> Result<f64, VectorizeError> {
    let df = vocab
        .doc_freq_of(term)
        .ok_or_else(|| VectorizeError::UnknownTerm(term.to_owned()))?;
    Ok(idf_value(n_docs, df))
}

fn idf_value(n_docs: usize, df: usize) -> f64 {
    (n_docs as f64 / df as f64).ln()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TfMode {
    /// occurrences / document length
    #[default]
    Relative,
    /// occurrences / occurrences: 1 for every present term
    Literal,
}

impl TfMode {
    fn tf(self, count: usize, doc_len: usize) -> f64 {
        match self {
            TfMode::Relative => count as f64 / doc_len as f64,
            TfMode::Literal => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfStats {
    pub idf: Vec<f64>,
    #[serde(default)]
    pub tf_mode: TfMode,
}

impl TfidfStats {
    pub fn fit(vocab: &Vocabulary, tf_mode: TfMode) -> TfidfStats {
        let idf = vocab
            .doc_freq()
            .iter()
            .map(|&df| idf_value(vocab.n_docs(), df))
            .collect();
        TfidfStats { idf, tf_mode }
    }
}

/// TF × IDF for each in-vocabulary term of `doc`. An empty document encodes
/// as the zero vector.
pub fn tfidf_vectorize(doc: &TokenSeq, vocab: &Vocabulary, stats: &TfidfStats) -> SparseVector {
    let entries = in_vocab_counts(doc, vocab)
        .into_iter()
        .map(|(i, c)| (i, stats.tf_mode.tf(c, doc.len()) * stats.idf[i]));
    SparseVector::from_entries(vocab.len(), entries).expect("vocabulary indices are in range")
}

/// Options controlling how a [`FeatureExtractor`] is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub kind: FeatureKind,
    pub max_features: Option<usize>,
    pub tf_mode: TfMode,
}

impl FeatureConfig {
    pub fn new(kind: FeatureKind) -> Self {
        FeatureConfig {
            kind,
            max_features: None,
            tf_mode: TfMode::Relative,
        }
    }
}

/// Fitted vocabulary plus, for TF-IDF, the IDF weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureExtractor {
    kind: FeatureKind,
    vocabulary: Vocabulary,
    tfidf: Option<TfidfStats>,
}

impl FeatureExtractor {
    pub fn fit(train_docs: &[TokenSeq], config: &FeatureConfig) -> Result<Self, VectorizeError> {
        let vocabulary = fit_vocabulary(train_docs, config.max_features)?;
        let tfidf = match config.kind {
            FeatureKind::Count => None,
            FeatureKind::Tfidf => Some(TfidfStats::fit(&vocabulary, config.tf_mode)),
        };
        Ok(FeatureExtractor {
            kind: config.kind,
            vocabulary,
            tfidf,
        })
    }

    pub fn from_parts(
        kind: FeatureKind,
        vocabulary: Vocabulary,
        tfidf: Option<TfidfStats>,
    ) -> Result<Self, VectorizeError> {
        match (kind, &tfidf) {
            (FeatureKind::Count, None) => {}
            (FeatureKind::Tfidf, Some(stats)) => {
                if stats.idf.len() != vocabulary.len() {
                    return Err(VectorizeError::Invalid(format!(
                        "{} idf weights for {} terms",
                        stats.idf.len(),
                        vocabulary.len()
                    )));
                }
                if stats.idf.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(VectorizeError::Invalid(
                        "idf weights must be finite and nonnegative".into(),
                    ));
                }
            }
            (FeatureKind::Count, Some(_)) => {
                return Err(VectorizeError::Invalid(
                    "count features carry no tf-idf stats".into(),
                ))
            }
            (FeatureKind::Tfidf, None) => {
                return Err(VectorizeError::Invalid(
                    "tf-idf features require tf-idf stats".into(),
                ))
            }
        }
        Ok(FeatureExtractor {
            kind,
            vocabulary,
            tfidf,
        })
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn tfidf_stats(&self) -> Option<&TfidfStats> {
        self.tfidf.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn transform(&self, doc: &TokenSeq) -> SparseVector {
        match &self.tfidf {
            None => count_vectorize(doc, &self.vocabulary),
            Some(stats) => tfidf_vectorize(doc, &self.vocabulary, stats),
        }
    }
}
