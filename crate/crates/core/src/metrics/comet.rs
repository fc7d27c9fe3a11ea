//! Plug-in point for learned translation-quality scorers such as COMET.
//!
//! No scoring model ships with this crate. [`CommandScorer`] talks to an
//! external program: for each item it writes one JSON object
//! `{"source": .., "translation": .., "reference": ..}` to the program's
//! stdin and reads a single decimal number from its stdout.

use std::io::Write;
use std::process::{Command, Stdio};

use serde::Serialize;

use super::{MetricReport, MetricsError};

pub trait ExternalScorer: Send + Sync {
    fn score(&self, source: &str, translation: &str, reference: &str) -> Result<f64, MetricsError>;
}

#[derive(Debug, Clone)]
pub struct CommandScorer {
    pub program: String,
    pub args: Vec<String>,
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    source: &'a str,
    translation: &'a str,
    reference: &'a str,
}

impl ExternalScorer for CommandScorer {
    fn score(&self, source: &str, translation: &str, reference: &str) -> Result<f64, MetricsError> {
        let scorer_err = |m: String| MetricsError::Scorer(format!("{}: {m}", self.program));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| scorer_err(e.to_string()))?;
        let payload = serde_json::to_vec(&ScoreRequest {
            source,
            translation,
            reference,
        })
        .map_err(|e| scorer_err(e.to_string()))?;
        child
            .stdin
            .take()
            .expect("piped stdin")
            .write_all(&payload)
            .map_err(|e| scorer_err(e.to_string()))?;
        let out = child
            .wait_with_output()
            .map_err(|e| scorer_err(e.to_string()))?;
        if !out.status.success() {
            return Err(scorer_err(format!(
                "exited with {}: {}",
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        text.trim()
            .parse::<f64>()
            .map_err(|_| scorer_err(format!("expected a number, got `{}`", text.trim())))
    }
}

/// One translated segment with its human reference.
#[derive(Debug, Clone)]
pub struct TranslationItem {
    pub id: String,
    pub source: String,
    pub translation: String,
    pub reference: String,
}

pub fn score_translations(
    task: &str,
    scorer: &dyn ExternalScorer,
    items: &[TranslationItem],
) -> Result<MetricReport, MetricsError> {
    let mut report = MetricReport::new(task);
    for item in items {
        let s = scorer.score(&item.source, &item.translation, &item.reference)?;
        report.push(item.id.clone(), s, Vec::new());
    }
    Ok(report)
}
