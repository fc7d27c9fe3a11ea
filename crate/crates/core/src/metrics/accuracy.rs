use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::text::normalize_for_containment;

/// One retrieval query: the returned candidates (a single best match, or
/// every tied top candidate) and the ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalOutcome {
    pub returned: Vec<String>,
    pub truth: String,
}

impl RetrievalOutcome {
    pub fn single(predicted: impl Into<String>, truth: impl Into<String>) -> Self {
        RetrievalOutcome {
            returned: vec![predicted.into()],
            truth: truth.into(),
        }
    }

    pub fn is_correct(&self) -> bool {
        self.returned.iter().any(|r| *r == self.truth)
    }
}

pub fn retrieval_accuracy(items: &[RetrievalOutcome]) -> Result<f64, MetricsError> {
    if items.is_empty() {
        return Err(MetricsError::Empty);
    }
    let hits = items.iter().filter(|o| o.is_correct()).count();
    Ok(hits as f64 / items.len() as f64)
}

/// Expected text is contained in the response after NFC, lowercase and
/// whitespace collapsing on both sides.
pub fn contains_expected(response: &str, expected: &str) -> bool {
    normalize_for_containment(response).contains(&normalize_for_containment(expected))
}

pub fn containment_accuracy<R: AsRef<str>, E: AsRef<str>>(
    pairs: &[(R, E)],
) -> Result<f64, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::Empty);
    }
    let hits = pairs
        .iter()
        .filter(|(r, e)| contains_expected(r.as_ref(), e.as_ref()))
        .count();
    Ok(hits as f64 / pairs.len() as f64)
}
