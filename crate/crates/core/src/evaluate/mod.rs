//! Held-out evaluation and grid search over features × classifiers.

mod grid;
mod metrics;

pub use grid::{
    grid_search, GridCell, GridResult, GridRow, GridSpec, KernelTemplate, Selection, CSV_HEADER,
};
pub use metrics::{compute_metrics, ConfusionMatrix, MetricReport, MetricsError, UndefinedMetrics};

use crate::corpus::{Corpus, Document, Label, Split};
use crate::pipeline::{ClassifierConfig, Pipeline};
use crate::vectorize::FeatureConfig;
use crate::{Error, Result};

pub fn documents<'a>(corpus: &'a Corpus, ids: &[usize]) -> Result<Vec<&'a Document>> {
    ids.iter()
        .map(|&id| {
            corpus
                .get(id)
                .ok_or_else(|| Error::Split(format!("document id {id} is outside the corpus")))
        })
        .collect()
}

/// Fits every artifact on the training side of `split`.
pub fn fit_on_split(
    corpus: &Corpus,
    split: &Split,
    features: &FeatureConfig,
    classifier: &ClassifierConfig,
) -> Result<Pipeline> {
    let train = documents(corpus, &split.train_ids)?;
    Pipeline::fit(&train, features, classifier)
}

/// Metrics of a fitted pipeline over `docs`.
pub fn evaluate_documents(pipeline: &Pipeline, docs: &[&Document]) -> Result<MetricReport> {
    let mut predicted = Vec::with_capacity(docs.len());
    for doc in docs {
        predicted.push(pipeline.classifier.predict(&pipeline.encode(&doc.text))?);
    }
    let truth: Vec<Label> = docs.iter().map(|d| d.label).collect();
    Ok(compute_metrics(&predicted, &truth)?)
}

/// Trains on the training side and reports metrics on the test side.
pub fn evaluate_pipeline(
    corpus: &Corpus,
    split: &Split,
    features: &FeatureConfig,
    classifier: &ClassifierConfig,
) -> Result<MetricReport> {
    let pipeline = fit_on_split(corpus, split, features, classifier)?;
    let test = documents(corpus, &split.test_ids)?;
    evaluate_documents(&pipeline, &test)
}
