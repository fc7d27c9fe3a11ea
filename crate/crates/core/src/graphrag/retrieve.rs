use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::index::FactIndex;
use super::RagError;
use crate::kg::{Direction, EdgeId, Graph, NodeId};
use crate::matching::{cosine_values, Embedder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetrievalParams {
    pub cutoff: f64,
    pub k: usize,
}

impl Default for RetrievalParams {
    fn default() -> Self {
        RetrievalParams { cutoff: 0.5, k: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredFact {
    pub edge: EdgeId,
    pub fact: String,
    pub score: f64,
    /// Reached through a seed node rather than by similarity alone.
    pub seeded: bool,
}

/// At most `k` facts, best first. Non-seeded facts all clear the cutoff.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RetrievedContext {
    pub facts: Vec<ScoredFact>,
}

impl RetrievedContext {
    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }
}

/// Edges incident to any seed node.
pub fn seeded_edges(graph: &Graph, seeds: &BTreeSet<NodeId>) -> BTreeSet<EdgeId> {
    seeds
        .iter()
        .filter_map(|&n| graph.neighbors(n, None, Direction::Both).ok())
        .flat_map(|ns| ns.into_iter().map(|(e, _)| e.id))
        .collect()
}

/// Similarity of every fact to a query vector; a zero query scores 0
/// everywhere.
pub fn score_facts(index: &FactIndex, query: &[f64]) -> Vec<f64> {
    index
        .facts
        .iter()
        .map(|f| {
            if f.vector.len() == query.len() {
                cosine_values(query, &f.vector).unwrap_or(0.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Rank facts against a query vector: keep seeded facts and facts at or
/// above the cutoff, order by score (then edge id), take the top `k`.
pub fn rank(
    index: &FactIndex,
    query: &[f64],
    seeded: &BTreeSet<EdgeId>,
    params: &RetrievalParams,
) -> RetrievedContext {
    let scores = score_facts(index, query);
    let mut kept: Vec<ScoredFact> = index
        .facts
        .iter()
        .zip(scores)
        .filter_map(|(f, score)| {
            let is_seed = seeded.contains(&f.edge);
            (is_seed || score >= params.cutoff).then(|| ScoredFact {
                edge: f.edge,
                fact: f.fact.clone(),
                score,
                seeded: is_seed,
            })
        })
        .collect();
    kept.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.edge.cmp(&b.edge)));
    kept.truncate(params.k);
    RetrievedContext { facts: kept }
}

/// Embed the question and rank the index. An empty result is logged as a
/// zero-retrieval event.
pub fn retrieve(
    question: &str,
    seeds: &BTreeSet<NodeId>,
    graph: &Graph,
    index: &FactIndex,
    embedder: &dyn Embedder,
    params: &RetrievalParams,
) -> Result<RetrievedContext, RagError> {
    if index.model != embedder.model() {
        return Err(RagError::StaleIndex(format!(
            "index built with `{}`, embedder is `{}`",
            index.model,
            embedder.model()
        )));
    }
    let query = embedder.embed_one(question)?;
    let ctx = rank(index, &query.values, &seeded_edges(graph, seeds), params);
    if ctx.is_empty() {
        tracing::warn!(
            question,
            "zero-retrieval: no fact cleared the similarity cutoff"
        );
    }
    Ok(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphrag::index::FactEmbedding;

    fn index(vectors: &[[f64; 2]]) -> FactIndex {
        FactIndex {
            model: "m".into(),
            dim: 2,
            facts: vectors
                .iter()
                .enumerate()
                .map(|(i, v)| FactEmbedding {
                    edge: EdgeId(i as u64),
                    fact: format!("fact {i}"),
                    vector: v.to_vec(),
                })
                .collect(),
        }
    }

    #[test]
    fn best_fact_first_and_cutoff() {
        let idx = index(&[[0.2, 1.0], [0.9, 0.4359], [1.0, 1.0], [0.0, 1.0]]);
        let ctx = rank(
            &idx,
            &[1.0, 0.0],
            &BTreeSet::new(),
            &RetrievalParams::default(),
        );
        let edges: Vec<u64> = ctx.facts.iter().map(|f| f.edge.0).collect();
        assert_eq!(edges, vec![1, 2]);
        assert!(ctx.facts.iter().all(|f| f.score >= 0.5));
    }

    #[test]
    fn top_k_and_order() {
        let vectors: Vec<[f64; 2]> = (0..25).map(|i| [1.0, i as f64 * 0.02]).collect();
        let ctx = rank(
            &index(&vectors),
            &[1.0, 0.0],
            &BTreeSet::new(),
            &RetrievalParams::default(),
        );
        assert_eq!(ctx.len(), 10);
        assert!(ctx.facts.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn seeds_bypass_cutoff_but_compete() {
        let idx = index(&[[0.0, 1.0], [1.0, 0.0]]);
        let seeds = BTreeSet::from([EdgeId(0)]);
        let ctx = rank(&idx, &[1.0, 0.0], &seeds, &RetrievalParams::default());
        assert_eq!(ctx.len(), 2);
        assert!(ctx.facts[1].seeded && ctx.facts[1].score == 0.0);
        let one = rank(
            &idx,
            &[1.0, 0.0],
            &seeds,
            &RetrievalParams { cutoff: 0.5, k: 1 },
        );
        assert_eq!(one.facts[0].edge, EdgeId(1));
    }

    #[test]
    fn zero_query_retrieves_nothing() {
        let idx = index(&[[1.0, 0.0]]);
        assert!(rank(
            &idx,
            &[0.0, 0.0],
            &BTreeSet::new(),
            &RetrievalParams::default()
        )
        .is_empty());
    }
}
