//! Labeled sentence datasets.
//!
//! A dataset file is UTF-8 with one record per line, `label<TAB>text`, where
//! the label is ASCII `0` (normal) or `1` (abnormal). Text is cleaned with
//! [`clean_text`] while loading; a record that cleans to nothing is rejected.

mod clean;
mod split;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use clean::{clean_text, is_emoji, EMOJI_RANGES};
pub(crate) use split::shuffle;
pub use split::{split_corpus, split_corpus_stratified, Split};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path} is not valid UTF-8")]
    NotUtf8 { path: PathBuf },
    #[error("empty corpus")]
    Empty,
    #[error("missing tab separator at line {0}")]
    MissingTab(usize),
    #[error("invalid label at line {0}")]
    InvalidLabel(usize),
    #[error("empty text after cleaning at line {0}")]
    EmptyText(usize),
    #[error("corpus must contain both classes")]
    SingleClass,
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
}

/// Binary class of a sentence. `Abnormal` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Label {
    Normal = 0,
    Abnormal = 1,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Normal, Label::Abnormal];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        match i {
            0 => Some(Label::Normal),
            1 => Some(Label::Abnormal),
            _ => None,
        }
    }

    /// The other class.
    pub fn flipped(self) -> Label {
        match self {
            Label::Normal => Label::Abnormal,
            Label::Abnormal => Label::Normal,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Normal => "normal",
            Label::Abnormal => "abnormal",
        }
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        l as u8
    }
}

impl TryFrom<u8> for Label {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Label::from_index(v as usize).ok_or_else(|| format!("label must be 0 or 1, got {v}"))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    /// Ordinal position of the record in its source.
    pub id: usize,
    pub text: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    source: String,
}

impl Corpus {
    /// Builds a corpus from `(label, raw text)` pairs, cleaning each text.
    pub fn from_records<I, S>(records: I, source: impl Into<String>) -> Result<Corpus, CorpusError>
    where
        I: IntoIterator<Item = (Label, S)>,
        S: AsRef<str>,
    {
        let mut documents = Vec::new();
        for (i, (label, raw)) in records.into_iter().enumerate() {
            let text = clean_text(raw.as_ref());
            if text.is_empty() {
                return Err(CorpusError::EmptyText(i + 1));
            }
            documents.push(Document {
                id: documents.len(),
                text,
                label,
            });
        }
        if documents.is_empty() {
            return Err(CorpusError::Empty);
        }
        Ok(Corpus {
            documents,
            source: source.into(),
        })
    }

    /// Parses dataset text. Blank lines are skipped; line numbers in errors
    /// are 1-based physical lines.
    pub fn parse(contents: &str, source: impl Into<String>) -> Result<Corpus, CorpusError> {
        let mut documents = Vec::new();
        for (i, line) in contents.split('\n').enumerate() {
            let lineno = i + 1;
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() {
                continue;
            }
            let (label, raw) = line
                .split_once('\t')
                .ok_or(CorpusError::MissingTab(lineno))?;
            let label = match label {
                "0" => Label::Normal,
                "1" => Label::Abnormal,
                _ => return Err(CorpusError::InvalidLabel(lineno)),
            };
            let text = clean_text(raw);
            if text.is_empty() {
                return Err(CorpusError::EmptyText(lineno));
            }
            documents.push(Document {
                id: documents.len(),
                text,
                label,
            });
        }
        if documents.is_empty() {
            return Err(CorpusError::Empty);
        }
        Ok(Corpus {
            documents,
            source: source.into(),
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn get(&self, id: usize) -> Option<&Document> {
        self.documents.get(id)
    }

    pub fn count(&self, label: Label) -> usize {
        self.documents.iter().filter(|d| d.label == label).count()
    }

    pub fn ensure_both_classes(&self) -> Result<(), CorpusError> {
        if Label::ALL.iter().all(|&l| self.count(l) > 0) {
            Ok(())
        } else {
            Err(CorpusError::SingleClass)
        }
    }

    /// Serializes back to the dataset format. Cleaned text never contains a
    /// tab or newline, so the output re-parses to an equal corpus.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            out.push(if doc.label == Label::Abnormal {
                '1'
            } else {
                '0'
            });
            out.push('\t');
            out.push_str(&doc.text);
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// SHA-256 of the cleaned dataset serialization, hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_tsv().as_bytes()))
    }

    /// Replaces the text of one document. Used to check that fitted
    /// artifacts never depend on held-out sentences.
    pub fn with_text_replaced(&self, id: usize, text: &str) -> Corpus {
        let mut copy = self.clone();
        if let Some(doc) = copy.documents.get_mut(id) {
            doc.text = clean_text(text);
        }
        copy
    }
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let contents = String::from_utf8(bytes).map_err(|_| CorpusError::NotUtf8 {
        path: path.to_path_buf(),
    })?;
    Corpus::parse(&contents, path.display().to_string())
}
