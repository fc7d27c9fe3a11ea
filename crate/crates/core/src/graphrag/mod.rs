//! Question answering over serialized graph facts: fact embedding index,
//! keyword seeding, similarity retrieval, grounded synthesis and
//! evaluation.

mod answer;
mod index;
mod plan;
mod qa;
mod retrieve;

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

pub use answer::{
    estimate_tokens, fit_context, synthesis_prompt, synthesize_answer, Answer,
    ANSWER_RESERVE_TOKENS, FALLBACK_ANSWER,
};
pub use index::{build_fact_index, FactEmbedding, FactIndex, INDEX_FORMAT, INDEX_VERSION};
pub use plan::{extract_query_plan, seed_node_search, QueryPlan};
pub use qa::{evaluate, generate_qa, load_qa, parse_qa, write_qa, QaEvaluation, QaItem, QaOutcome};
pub use retrieve::{
    rank, retrieve, score_facts, seeded_edges, RetrievalParams, RetrievedContext, ScoredFact,
};

use crate::enrich::{BackendError, Enricher};
use crate::kg::{Graph, GraphError};
use crate::matching::Embedder;

#[derive(Debug, Error)]
pub enum RagError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("fact index line {line}: {msg}")]
    IndexFormat { line: usize, msg: String },
    #[error("stale fact index: {0}")]
    StaleIndex(String),
    #[error("QA file line {line}: {msg}")]
    QaFormat { line: usize, msg: String },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl RagError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        RagError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// The question pipeline over one immutable graph and fact index:
/// plan, seed, retrieve, synthesize.
#[derive(Clone)]
pub struct GraphRag {
    graph: Arc<Graph>,
    index: Arc<FactIndex>,
    enricher: Enricher,
    embedder: Arc<dyn Embedder>,
    params: RetrievalParams,
}

impl GraphRag {
    /// Fails when the index was built with another embedder or from other
    /// graph facts.
    pub fn new(
        graph: Arc<Graph>,
        index: Arc<FactIndex>,
        enricher: Enricher,
        embedder: Arc<dyn Embedder>,
        params: RetrievalParams,
    ) -> Result<Self, RagError> {
        if index.model != embedder.model() {
            return Err(RagError::StaleIndex(format!(
                "index built with `{}`, embedder is `{}`",
                index.model,
                embedder.model()
            )));
        }
        index.check_against(&graph)?;
        Ok(GraphRag {
            graph,
            index,
            enricher,
            embedder,
            params,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn index(&self) -> &FactIndex {
        &self.index
    }

    pub fn retrieve(&self, question: &str, plan: &QueryPlan) -> Result<RetrievedContext, RagError> {
        let seeds = seed_node_search(plan, &self.graph);
        retrieve(
            question,
            &seeds,
            &self.graph,
            &self.index,
            self.embedder.as_ref(),
            &self.params,
        )
    }

    pub fn ask(&self, question: &str) -> Result<Answer, RagError> {
        let plan = extract_query_plan(question, &self.enricher);
        let context = self.retrieve(question, &plan)?;
        let mut answer = synthesize_answer(question, &context, &self.enricher)?;
        answer.plan = plan;
        Ok(answer)
    }
}
