use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::enrich::{complete_structured, Enricher, Invalid, Task};
use crate::kg::{Graph, NodeId};
use crate::text::collapse_whitespace;

/// Search terms extracted from a question. Every list is lowercase and free
/// of duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryPlan {
    #[serde(default)]
    pub concepts: Vec<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub synonyms: Vec<String>,
}

fn clean(terms: Vec<String>) -> Vec<String> {
    let mut seen = HashSet::new();
    terms
        .into_iter()
        .map(|t| collapse_whitespace(&t.to_lowercase()))
        .filter(|t| !t.is_empty() && seen.insert(t.clone()))
        .collect()
}

impl QueryPlan {
    pub fn new(concepts: Vec<String>, keywords: Vec<String>, synonyms: Vec<String>) -> Self {
        QueryPlan {
            concepts: clean(concepts),
            keywords: clean(keywords),
            synonyms: clean(synonyms),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.keywords.is_empty() && self.synonyms.is_empty()
    }

    /// All distinct terms, concepts first.
    pub fn terms(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.concepts
            .iter()
            .chain(&self.keywords)
            .chain(&self.synonyms)
            .map(String::as_str)
            .filter(|t| seen.insert(*t))
            .collect()
    }
}

/// Ask the model for a query plan. Any failure yields the empty plan, so
/// retrieval continues on embeddings alone.
pub fn extract_query_plan(question: &str, enricher: &Enricher) -> QueryPlan {
    let question = collapse_whitespace(question);
    if question.is_empty() {
        return QueryPlan::default();
    }
    let system = enricher
        .prompts()
        .render(Task::QueryPlan, enricher.vocabulary());
    let outcome = complete_structured(
        enricher.backend(),
        &system,
        &question,
        enricher.config().max_retries,
        |p: QueryPlan| Ok::<_, Invalid>(QueryPlan::new(p.concepts, p.keywords, p.synonyms)),
    );
    match outcome {
        Ok(s) => s.value,
        Err(e) => {
            tracing::warn!(error = %e, "query planning failed; using embedding-only retrieval");
            QueryPlan::default()
        }
    }
}

/// Nodes whose lowercase name contains any plan term.
pub fn seed_node_search(plan: &QueryPlan, graph: &Graph) -> BTreeSet<NodeId> {
    let terms = plan.terms();
    if terms.is_empty() {
        return BTreeSet::new();
    }
    graph
        .nodes()
        .filter(|n| {
            let name = n.name.to_lowercase();
            terms.iter().any(|t| name.contains(t))
        })
        .map(|n| n.id)
        .collect()
}
