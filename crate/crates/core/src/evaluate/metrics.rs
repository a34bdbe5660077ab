use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no predictions to evaluate")]
    Empty,
    #[error("{predicted} predictions for {truth} true labels")]
    LengthMismatch { predicted: usize, truth: usize },
}

/// Counts with abnormal as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn from_labels(predicted: &[Label], truth: &[Label]) -> ConfusionMatrix {
        let mut m = ConfusionMatrix::default();
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p, t) {
                (Label::Abnormal, Label::Abnormal) => m.tp += 1,
                (Label::Abnormal, Label::Normal) => m.fp += 1,
                (Label::Normal, Label::Abnormal) => m.fn_ += 1,
                (Label::Normal, Label::Normal) => m.tn += 1,
            }
        }
        m
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Same counts with the normal class treated as positive.
    pub fn swapped(&self) -> ConfusionMatrix {
        ConfusionMatrix {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

/// Which ratios had a zero denominator and were reported as 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndefinedMetrics {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl UndefinedMetrics {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    /// Positive (abnormal) class.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Unweighted mean over both classes.
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub matrix: ConfusionMatrix,
    /// Zero-denominator flags for the positive-class metrics.
    pub undefined: UndefinedMetrics,
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

fn class_scores(m: &ConfusionMatrix) -> (f64, f64, f64, UndefinedMetrics) {
    let (precision, p_undef) = ratio(m.tp, m.tp + m.fp);
    let (recall, r_undef) = ratio(m.tp, m.tp + m.fn_);
    let (f1, f_undef) = if precision + recall > 0.0 {
        (2.0 * precision * recall / (precision + recall), false)
    } else {
        (0.0, true)
    };
    let flags = UndefinedMetrics {
        precision: p_undef,
        recall: r_undef,
        f1: f_undef,
    };
    (precision, recall, f1, flags)
}

impl MetricReport {
    pub fn from_matrix(matrix: ConfusionMatrix) -> MetricReport {
        let (accuracy, _) = ratio(matrix.tp + matrix.tn, matrix.total());
        let (precision, recall, f1, undefined) = class_scores(&matrix);
        let (neg_p, neg_r, neg_f1, _) = class_scores(&matrix.swapped());
        MetricReport {
            accuracy,
            precision,
            recall,
            f1,
            macro_precision: (precision + neg_p) / 2.0,
            macro_recall: (recall + neg_r) / 2.0,
            macro_f1: (f1 + neg_f1) / 2.0,
            matrix,
            undefined,
        }
    }
}

pub fn compute_metrics(predicted: &[Label], truth: &[Label]) -> Result<MetricReport, MetricsError> {
    if predicted.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    if predicted.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(MetricReport::from_matrix(ConfusionMatrix::from_labels(
        predicted, truth,
    )))
}
