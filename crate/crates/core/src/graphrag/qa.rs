//! Question sets and containment-accuracy evaluation.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GraphRag, RagError};
use crate::kg::{Direction, EdgeKind, Graph, NodeKind};
use crate::metrics::{contains_expected, MetricReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaItem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub question: String,
    pub expected: String,
}

impl QaItem {
    pub fn new(question: impl Into<String>, expected: impl Into<String>) -> Self {
        QaItem {
            id: None,
            question: question.into(),
            expected: expected.into(),
        }
    }
}

/// Parse a QA set: one JSON object per line, blank lines ignored. Items
/// without an id get `q001`, `q002`, ... by position.
pub fn parse_qa<R: BufRead>(input: R) -> Result<Vec<QaItem>, RagError> {
    let mut items = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let bad = |msg: String| RagError::QaFormat { line: i + 1, msg };
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut item: QaItem = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        if item.question.trim().is_empty() || item.expected.trim().is_empty() {
            return Err(bad("question and expected must be non-empty".into()));
        }
        if item.id.is_none() {
            item.id = Some(format!("q{:03}", items.len() + 1));
        }
        items.push(item);
    }
    Ok(items)
}

pub fn load_qa(path: &Path) -> Result<Vec<QaItem>, RagError> {
    let file = std::fs::File::open(path).map_err(|e| RagError::io(path, e))?;
    parse_qa(BufReader::new(file))
}

pub fn write_qa<W: Write>(items: &[QaItem], mut out: W) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaOutcome {
    pub id: String,
    pub hit: bool,
    pub zero_retrieval: bool,
    pub facts: usize,
    /// SHA-256 of the answer text, or of the error message on failure.
    pub answer_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaEvaluation {
    pub outcomes: Vec<QaOutcome>,
    pub report: MetricReport,
}

impl QaEvaluation {
    pub fn accuracy(&self) -> f64 {
        self.report.aggregate()
    }

    pub fn zero_retrievals(&self) -> usize {
        self.outcomes.iter().filter(|o| o.zero_retrieval).count()
    }

    /// Tab separated: header, one row per question, aggregate line.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# task\tqa")?;
        writeln!(out, "id\thit\tzero_retrieval\tfacts\tanswer_sha256")?;
        for o in &self.outcomes {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                o.id,
                if o.hit { "hit" } else { "miss" },
                u8::from(o.zero_retrieval),
                o.facts,
                o.answer_sha256
            )?;
        }
        writeln!(
            out,
            "# aggregate\t{:.6}\tn={}\tzero_retrieval={}",
            self.accuracy(),
            self.report.n(),
            self.zero_retrievals()
        )
    }
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Run every question through the full pipeline. A failing question counts
/// as a miss and is flagged; evaluation itself never fails.
pub fn evaluate(items: &[QaItem], rag: &GraphRag) -> QaEvaluation {
    let mut report = MetricReport::new("qa-containment");
    let mut outcomes = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let id = item.id.clone().unwrap_or_else(|| format!("q{:03}", i + 1));
        let outcome = match rag.ask(&item.question) {
            Ok(a) => QaOutcome {
                id: id.clone(),
                hit: contains_expected(&a.answer, &item.expected),
                zero_retrieval: a.zero_retrieval,
                facts: a.facts.len(),
                answer_sha256: sha256_hex(&a.answer),
                error: None,
            },
            Err(e) => {
                tracing::warn!(id, error = %e, "question failed");
                QaOutcome {
                    id: id.clone(),
                    hit: false,
                    zero_retrieval: false,
                    facts: 0,
                    answer_sha256: sha256_hex(&e.to_string()),
                    error: Some(e.to_string()),
                }
            }
        };
        let mut flags = Vec::new();
        if outcome.zero_retrieval {
            flags.push("zero_retrieval".to_string());
        }
        if outcome.error.is_some() {
            flags.push("error".to_string());
        }
        report.push(id, if outcome.hit { 1.0 } else { 0.0 }, flags);
        outcomes.push(outcome);
    }
    QaEvaluation { outcomes, report }
}

/// Derive up to `limit` question/answer pairs from graph facts, cycling
/// through recipe-ingredient, recipe-cuisine and ingredient-allergen
/// questions in node order.
pub fn generate_qa(graph: &Graph, limit: usize) -> Vec<QaItem> {
    let mut pools: [Vec<QaItem>; 3] = Default::default();
    for recipe in graph.nodes_of_kind(NodeKind::Recipe) {
        let out = |kind| {
            graph
                .neighbors(recipe.id, Some(kind), Direction::Out)
                .unwrap_or_default()
        };
        if let Some((_, ing)) = out(EdgeKind::Contains).first() {
            pools[0].push(QaItem::new(
                format!(
                    "Which ingredients does the recipe '{}' contain?",
                    recipe.name
                ),
                ing.name.clone(),
            ));
        }
        if let Some((_, cuisine)) = out(EdgeKind::IsPartOf).first() {
            pools[1].push(QaItem::new(
                format!("Which cuisine is the recipe '{}' part of?", recipe.name),
                cuisine.name.clone(),
            ));
        }
    }
    for ing in graph.nodes_of_kind(NodeKind::Ingredient) {
        let allergens = graph
            .neighbors(ing.id, Some(EdgeKind::AllergenOf), Direction::Out)
            .unwrap_or_default();
        if let Some((_, cat)) = allergens.first() {
            pools[2].push(QaItem::new(
                format!("Which allergen category does {} belong to?", ing.name),
                cat.name.clone(),
            ));
        }
    }
    let mut out = Vec::new();
    let mut cursors = [0usize; 3];
    while out.len() < limit {
        let before = out.len();
        for (pool, cursor) in pools.iter().zip(cursors.iter_mut()) {
            if out.len() < limit && *cursor < pool.len() {
                out.push(pool[*cursor].clone());
                *cursor += 1;
            }
        }
        if out.len() == before {
            break;
        }
    }
    for (i, item) in out.iter_mut().enumerate() {
        item.id = Some(format!("g{:03}", i + 1));
    }
    out
}
