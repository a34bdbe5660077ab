use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{compute_metrics, MetricReport};
use crate::corpus::{Corpus, Label, Split};
use crate::pipeline::{
    encode_tokens, fit_classifier, tokenize_documents, ClassifierConfig, ClassifierKind,
};
use crate::sparse::{FeatureKind, FeatureMatrix};
use crate::svm::{KernelKind, KernelSpec, SolverConfig};
use crate::vectorize::{FeatureConfig, FeatureExtractor, TfMode};
use crate::{Error, Result};

/// Kernel family plus the coefficient that is not swept by the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTemplate {
    pub kind: KernelKind,
    pub coef0: f64,
}

impl KernelTemplate {
    pub fn new(kind: KernelKind) -> Self {
        KernelTemplate { kind, coef0: 0.0 }
    }

    pub fn with_gamma(&self, gamma: f64) -> KernelSpec {
        KernelSpec {
            kind: self.kind,
            gamma,
            coef0: self.coef0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    #[default]
    Accuracy,
    F1,
}

impl Selection {
    fn key(self, r: &MetricReport) -> f64 {
        match self {
            Selection::Accuracy => r.accuracy,
            Selection::F1 => r.f1,
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selection::Accuracy => "accuracy",
            Selection::F1 => "f1",
        })
    }
}

impl FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "accuracy" => Ok(Selection::Accuracy),
            "f1" => Ok(Selection::F1),
            other => Err(format!(
                "unknown selection metric `{other}` (expected accuracy or f1)"
            )),
        }
    }
}

/// Axes of the search. NB cells take only `nb_alphas`; SVM cells take
/// `kernels × c_values × gamma_values` (linear cells keep the gamma
/// coordinate even though the kernel ignores it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub feature_kinds: Vec<FeatureKind>,
    pub classifiers: Vec<ClassifierKind>,
    pub kernels: Vec<KernelTemplate>,
    pub c_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub nb_alphas: Vec<f64>,
    pub fit_prior: bool,
    pub solver: SolverConfig,
    pub max_features: Option<usize>,
    pub tf_mode: TfMode,
    pub select_by: Selection,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            feature_kinds: vec![FeatureKind::Count, FeatureKind::Tfidf],
            classifiers: vec![ClassifierKind::Nb, ClassifierKind::Svm],
            kernels: vec![
                KernelTemplate::new(KernelKind::Linear),
                KernelTemplate::new(KernelKind::Rbf),
            ],
            c_values: vec![1.0, 10.0, 100.0],
            gamma_values: vec![0.01, 0.1, 1.0],
            nb_alphas: vec![1.0],
            fit_prior: true,
            solver: SolverConfig::default(),
            max_features: None,
            tf_mode: TfMode::Relative,
            select_by: Selection::Accuracy,
        }
    }
}

fn positive_list(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Grid(format!("{name} must not be empty")));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Grid(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.feature_kinds.is_empty() {
            return Err(Error::Grid("feature kinds must not be empty".into()));
        }
        if self.classifiers.is_empty() {
            return Err(Error::Grid("classifiers must not be empty".into()));
        }
        if self.classifiers.contains(&ClassifierKind::Nb) {
            positive_list("nb alphas", &self.nb_alphas)?;
        }
        if self.classifiers.contains(&ClassifierKind::Svm) {
            if self.kernels.is_empty() {
                return Err(Error::Grid("kernels must not be empty".into()));
            }
            positive_list("C values", &self.c_values)?;
            positive_list("gamma values", &self.gamma_values)?;
        }
        Ok(())
    }

    /// Cells in evaluation order: feature kind, then classifier, then
    /// alpha (NB) or kernel, C, gamma (SVM).
    pub fn cells(&self) -> Vec<GridCell> {
        let mut cells = Vec::new();
        for &feature_kind in &self.feature_kinds {
            for &classifier in &self.classifiers {
                match classifier {
                    ClassifierKind::Nb => {
                        for &alpha in &self.nb_alphas {
                            cells.push(GridCell {
                                feature_kind,
                                classifier: ClassifierConfig::Nb {
                                    alpha,
                                    fit_prior: self.fit_prior,
                                },
                            });
                        }
                    }
                    ClassifierKind::Svm => {
                        for kernel in &self.kernels {
                            for &c in &self.c_values {
                                for &gamma in &self.gamma_values {
                                    cells.push(GridCell {
                                        feature_kind,
                                        classifier: ClassifierConfig::Svm {
                                            c,
                                            kernel: kernel.with_gamma(gamma),
                                            solver: self.solver,
                                        },
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub feature_kind: FeatureKind,
    pub classifier: ClassifierConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub cell: GridCell,
    /// Metrics, or the training error of this cell.
    pub outcome: std::result::Result<MetricReport, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
    /// First row with the highest selection metric; `None` if every cell failed.
    pub best: Option<usize>,
    pub select_by: Selection,
}

pub const CSV_HEADER: [&str; 10] = [
    "feature_kind",
    "classifier",
    "kernel",
    "C",
    "gamma",
    "alpha",
    "accuracy",
    "precision",
    "recall",
    "f1",
];

impl GridRow {
    /// CSV fields; axes that do not apply to the cell are empty, and so are
    /// the metrics of a failed cell.
    pub fn csv_fields(&self) -> Vec<String> {
        let mut fields = vec![
            self.cell.feature_kind.to_string(),
            self.cell.classifier.kind().to_string(),
        ];
        match &self.cell.classifier {
            ClassifierConfig::Nb { alpha, .. } => {
                fields.extend([
                    String::new(),
                    String::new(),
                    String::new(),
                    alpha.to_string(),
                ]);
            }
            ClassifierConfig::Svm { c, kernel, .. } => {
                fields.extend([
                    kernel.kind.to_string(),
                    c.to_string(),
                    kernel.gamma.to_string(),
                    String::new(),
                ]);
            }
        }
        match &self.outcome {
            Ok(r) => {
                fields.extend([r.accuracy, r.precision, r.recall, r.f1].map(|v| v.to_string()))
            }
            Err(_) => fields.extend(std::iter::repeat_n(String::new(), 4)),
        }
        fields
    }
}

impl GridResult {
    pub fn best_row(&self) -> Option<&GridRow> {
        self.best.map(|i| &self.rows[i])
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(CSV_HEADER)?;
        for row in &self.rows {
            writer.write_record(row.csv_fields())?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Grid(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Grid(e.to_string()))
    }
}

struct Encoded {
    train: FeatureMatrix,
    test: FeatureMatrix,
}

fn encode_split(corpus: &Corpus, split: &Split, config: &FeatureConfig) -> Result<Encoded> {
    let train_docs = super::documents(corpus, &split.train_ids)?;
    let test_docs = super::documents(corpus, &split.test_ids)?;
    let train_tokens = tokenize_documents(train_docs.iter().copied());
    let extractor = FeatureExtractor::fit(&train_tokens, config)?;
    let test_tokens = tokenize_documents(test_docs.iter().copied());
    let train = encode_tokens(
        &extractor,
        &train_tokens,
        train_docs.iter().map(|d| d.label).collect(),
    )?;
    let test = encode_tokens(
        &extractor,
        &test_tokens,
        test_docs.iter().map(|d| d.label).collect(),
    )?;
    Ok(Encoded { train, test })
}

fn run_cell(encoded: &Encoded, cell: &GridCell) -> std::result::Result<MetricReport, String> {
    let model = fit_classifier(&encoded.train, &cell.classifier).map_err(|e| e.to_string())?;
    let predicted: Vec<Label> = encoded
        .test
        .rows()
        .iter()
        .map(|x| model.predict(x))
        .collect::<Result<_>>()
        .map_err(|e| e.to_string())?;
    compute_metrics(&predicted, encoded.test.labels()).map_err(|e| e.to_string())
}

/// Linear kernels ignore γ, so cells differing only in γ share one fit.
fn fit_key(cell: &GridCell) -> GridCell {
    let mut key = *cell;
    if let ClassifierConfig::Svm { kernel, .. } = &mut key.classifier {
        if !kernel.kind.uses_gamma() {
            kernel.gamma = 0.0;
        }
    }
    key
}

/// Evaluates every cell of `grid` on one split. Features are fitted once per
/// feature kind on the training side; cells run on up to `jobs` threads and
/// results keep grid order.
pub fn grid_search(
    corpus: &Corpus,
    split: &Split,
    grid: &GridSpec,
    jobs: usize,
) -> Result<GridResult> {
    grid.validate()?;
    let mut encoded = Vec::new();
    for &kind in &grid.feature_kinds {
        let config = FeatureConfig {
            kind,
            max_features: grid.max_features,
            tf_mode: grid.tf_mode,
        };
        encoded.push((kind, encode_split(corpus, split, &config)?));
    }
    let cells = grid.cells();
    let mut distinct: Vec<GridCell> = Vec::new();
    let slots: Vec<usize> = cells
        .iter()
        .map(|cell| {
            let key = fit_key(cell);
            distinct
                .iter()
                .position(|d| fit_key(d) == key)
                .unwrap_or_else(|| {
                    distinct.push(*cell);
                    distinct.len() - 1
                })
        })
        .collect();
    let evaluate = |cell: &GridCell| {
        let (_, enc) = encoded
            .iter()
            .find(|(k, _)| *k == cell.feature_kind)
            .expect("every feature kind was encoded");
        run_cell(enc, cell)
    };
    let outcomes: Vec<_> = if jobs <= 1 {
        distinct.iter().map(evaluate).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Grid(e.to_string()))?;
        pool.install(|| distinct.par_iter().map(evaluate).collect())
    };
    let rows: Vec<GridRow> = cells
        .iter()
        .zip(&slots)
        .map(|(cell, &slot)| GridRow {
            cell: *cell,
            outcome: outcomes[slot].clone(),
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (i, row) in rows.iter().enumerate() {
        if let Ok(report) = &row.outcome {
            let key = grid.select_by.key(report);
            if best.is_none_or(|(_, top)| key > top) {
                best = Some((i, key));
            }
        }
    }
    Ok(GridResult {
        rows,
        best: best.map(|(i, _)| i),
        select_by: grid.select_by,
    })
}
