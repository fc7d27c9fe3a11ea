use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Set-based F1 for multi-label fields.
///
/// Both sets empty scores 1; an empty intersection otherwise scores 0.
pub fn set_f1<T: Ord>(truth: &BTreeSet<T>, predicted: &BTreeSet<T>) -> f64 {
    if truth.is_empty() && predicted.is_empty() {
        return 1.0;
    }
    let hits = truth.intersection(predicted).count();
    if hits == 0 {
        return 0.0;
    }
    let precision = hits as f64 / predicted.len() as f64;
    let recall = hits as f64 / truth.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryConfusion {
    #[serde(rename = "tp")]
    pub true_pos: u64,
    #[serde(rename = "fp")]
    pub false_pos: u64,
    #[serde(rename = "fn")]
    pub false_neg: u64,
    #[serde(rename = "tn")]
    pub true_neg: u64,
}

impl BinaryConfusion {
    pub fn new(true_pos: u64, false_pos: u64, false_neg: u64, true_neg: u64) -> Self {
        BinaryConfusion {
            true_pos,
            false_pos,
            false_neg,
            true_neg,
        }
    }

    pub fn observe(&mut self, truth: bool, predicted: bool) {
        match (truth, predicted) {
            (true, true) => self.true_pos += 1,
            (false, true) => self.false_pos += 1,
            (true, false) => self.false_neg += 1,
            (false, false) => self.true_neg += 1,
        }
    }

    /// Precision + recall is zero, so F1 falls back to 0.
    pub fn is_degenerate(&self) -> bool {
        self.true_pos == 0
    }
}

/// Standard binary F1. `0/0` cases count as 0 (see [`BinaryConfusion::is_degenerate`]).
pub fn binary_f1(c: &BinaryConfusion) -> f64 {
    let tp = c.true_pos as f64;
    let precision = if c.true_pos + c.false_pos == 0 {
        0.0
    } else {
        tp / (tp + c.false_pos as f64)
    };
    let recall = if c.true_pos + c.false_neg == 0 {
        0.0
    } else {
        tp / (tp + c.false_neg as f64)
    };
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Unweighted mean of per-label binary F1 over `labels`.
pub fn mean_label_f1<S: AsRef<str>>(
    per_label: &BTreeMap<String, BinaryConfusion>,
    labels: &[S],
) -> Result<f64, MetricsError> {
    if labels.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut sum = 0.0;
    for label in labels {
        let c = per_label
            .get(label.as_ref())
            .ok_or_else(|| MetricsError::MissingLabel(label.as_ref().to_string()))?;
        sum += binary_f1(c);
    }
    Ok(sum / labels.len() as f64)
}
