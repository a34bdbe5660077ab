//! Versioned single-file model bundles.
//!
//! A bundle is one pretty-printed JSON object. Every float is written in
//! scientific notation with 17 significant digits (`{:.16e}`), which
//! round-trips any `f64` exactly; struct fields are written in declaration
//! order, so saving the same bundle always produces the same bytes.
//!
//! Schema (format version 1):
//!
//! ```text
//! {
//!   "format_version": 1,
//!   "feature_kind": "count" | "tfidf",
//!   "vocabulary": { "terms": [..], "doc_freq": [..], "n_docs": N },
//!   "tfidf_stats": null | { "idf": [..], "tf_mode": "relative" | "literal" },
//!   "classifier": { "type": "nb", ...NbModel } | { "type": "svm", ...SvmModel },
//!   "metadata": { "trained_at_unix": null | secs, "corpus_fingerprint": hex,
//!                 "seed": u64, "train_fraction": f, "stratified": bool,
//!                 "n_train": N, "features": {..}, "hyperparameters": {..} }
//! }
//! ```

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;

use crate::pipeline::{ClassifierConfig, ClassifierModel, Pipeline};
use crate::sparse::FeatureKind;
use crate::vectorize::{FeatureConfig, FeatureExtractor, TfidfStats, Vocabulary};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("failed to write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("failed to read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u64),
    #[error("model file has no format_version")]
    MissingVersion,
    #[error("{0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct Metadata {
    pub trained_at_unix: Option<u64>,
    pub corpus_fingerprint: String,
    pub seed: u64,
    pub train_fraction: f64,
    pub stratified: bool,
    pub n_train: usize,
    pub features: FeatureConfig,
    pub hyperparameters: ClassifierConfig,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    pub feature_kind: FeatureKind,
    pub vocabulary: Vocabulary,
    pub tfidf_stats: Option<TfidfStats>,
    pub classifier: ClassifierModel,
    pub metadata: Metadata,
}

impl ModelBundle {
    pub fn new(pipeline: &Pipeline, metadata: Metadata) -> ModelBundle {
        ModelBundle {
            format_version: FORMAT_VERSION,
            feature_kind: pipeline.features.kind(),
            vocabulary: pipeline.features.vocabulary().clone(),
            tfidf_stats: pipeline.features.tfidf_stats().cloned(),
            classifier: pipeline.classifier.clone(),
            metadata,
        }
    }

    /// Checks every cross-field and per-model invariant.
    pub fn validate(&self) -> Result<(), PersistError> {
        if self.format_version != FORMAT_VERSION {
            return Err(PersistError::UnsupportedVersion(self.format_version.into()));
        }
        match (self.feature_kind, &self.tfidf_stats) {
            (FeatureKind::Tfidf, None) => {
                return Err(PersistError::Invariant(
                    "tfidf model is missing tfidf_stats".into(),
                ))
            }
            (FeatureKind::Count, Some(_)) => {
                return Err(PersistError::Invariant(
                    "count model must not carry tfidf_stats".into(),
                ))
            }
            _ => {}
        }
        FeatureExtractor::from_parts(
            self.feature_kind,
            self.vocabulary.clone(),
            self.tfidf_stats.clone(),
        )
        .map_err(|e| PersistError::Invariant(e.to_string()))?;
        if self.classifier.dim() != self.vocabulary.len() {
            return Err(PersistError::Invariant(format!(
                "classifier dimension {} does not match vocabulary size {}",
                self.classifier.dim(),
                self.vocabulary.len()
            )));
        }
        self.classifier
            .validate()
            .map_err(|e| PersistError::Invariant(e.to_string()))
    }

    pub fn pipeline(&self) -> Result<Pipeline, PersistError> {
        let features = FeatureExtractor::from_parts(
            self.feature_kind,
            self.vocabulary.clone(),
            self.tfidf_stats.clone(),
        )
        .map_err(|e| PersistError::Invariant(e.to_string()))?;
        Ok(Pipeline {
            features,
            classifier: self.classifier.clone(),
        })
    }

    pub fn to_json(&self) -> Result<Vec<u8>, PersistError> {
        self.validate()?;
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits::default());
        self.serialize(&mut ser)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_json(bytes: &[u8]) -> Result<ModelBundle, PersistError> {
        let value: serde_json::Value = serde_json::from_slice(bytes)?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or(PersistError::MissingVersion)?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(PersistError::UnsupportedVersion(version));
        }
        let bundle: ModelBundle = serde_json::from_slice(bytes)?;
        bundle.validate()?;
        Ok(bundle)
    }
}

/// Writes through a temp file in the target directory and renames it into
/// place, so a failed save leaves no partial file.
pub fn save_model(bundle: &ModelBundle, path: impl AsRef<Path>) -> Result<(), PersistError> {
    let path = path.as_ref();
    let bytes = bundle.to_json()?;
    let write_err = |source| PersistError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(write_err)?;
    tmp.write_all(&bytes).map_err(write_err)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(fs::Permissions::from_mode(0o644))
            .map_err(write_err)?;
    }
    tmp.as_file().sync_all().map_err(write_err)?;
    tmp.persist(path).map_err(|e| write_err(e.error))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelBundle, PersistError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| PersistError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ModelBundle::from_json(&bytes)
}

/// Pretty JSON with floats as `d.ddddddddddddddddde±x`.
#[derive(Default)]
struct FixedDigits<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}
