//! Evaluation formulas: gestalt string similarity, set and binary F1,
//! retrieval accuracy and QA containment accuracy.

mod accuracy;
mod comet;
mod f1;
mod gestalt;
mod report;

use thiserror::Error;

pub use accuracy::{containment_accuracy, contains_expected, retrieval_accuracy, RetrievalOutcome};
pub use comet::{score_translations, CommandScorer, ExternalScorer, TranslationItem};
pub use f1::{binary_f1, mean_label_f1, set_f1, BinaryConfusion};
pub use gestalt::{
    directed_matches, gestalt_similarity, matching_characters, record_similarity,
    sequence_similarity,
};
pub use report::{MetricReport, ScoreRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("metric needs at least one item")]
    Empty,
    #[error("no confusion counts for label `{0}`")]
    MissingLabel(String),
    #[error("external scorer failed: {0}")]
    Scorer(String),
}
