use serde::{Deserialize, Serialize};

use super::plan::QueryPlan;
use super::retrieve::{RetrievedContext, ScoredFact};
use super::RagError;
use crate::enrich::{ChatMessage, Enricher, Task};

/// Reply used when no fact was retrieved; the model is not consulted.
pub const FALLBACK_ANSWER: &str =
    "No knowledge could be retrieved from the knowledge graph for this question, so it cannot be answered.";

/// Tokens kept free for the model's reply.
pub const ANSWER_RESERVE_TOKENS: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub answer: String,
    /// The facts the model was given, best first.
    pub facts: Vec<ScoredFact>,
    pub zero_retrieval: bool,
    #[serde(default)]
    pub plan: QueryPlan,
}

/// Rough token count: one token per four characters, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.chars().count().div_ceil(4)
}

pub fn synthesis_prompt(question: &str, facts: &[ScoredFact]) -> String {
    let mut out = String::from("Facts:\n");
    for (i, f) in facts.iter().enumerate() {
        out.push_str(&format!("{}. {}\n", i + 1, f.fact));
    }
    out.push_str(&format!("\nQuestion: {question}"));
    out
}

/// Longest best-first prefix of `facts` whose prompt fits `budget` tokens
/// alongside `system`.
pub fn fit_context<'a>(
    system: &str,
    question: &str,
    facts: &'a [ScoredFact],
    budget: usize,
) -> &'a [ScoredFact] {
    let base = estimate_tokens(system);
    let mut n = facts.len();
    while n > 0 && base + estimate_tokens(&synthesis_prompt(question, &facts[..n])) > budget {
        n -= 1;
    }
    &facts[..n]
}

/// Answer from the retrieved facts only. With no facts the fixed fallback
/// is returned and nothing is cited.
pub fn synthesize_answer(
    question: &str,
    context: &RetrievedContext,
    enricher: &Enricher,
) -> Result<Answer, RagError> {
    if context.is_empty() {
        return Ok(Answer {
            answer: FALLBACK_ANSWER.to_string(),
            facts: Vec::new(),
            zero_retrieval: true,
            plan: QueryPlan::default(),
        });
    }
    let system = enricher
        .prompts()
        .render(Task::Synthesis, enricher.vocabulary());
    let budget = (enricher.config().num_ctx as usize).saturating_sub(ANSWER_RESERVE_TOKENS);
    let facts = fit_context(&system, question, &context.facts, budget);
    let user = synthesis_prompt(question, facts);
    let reply = enricher
        .backend()
        .chat(&[ChatMessage::system(system), ChatMessage::user(user)])?;
    Ok(Answer {
        answer: reply.trim().to_string(),
        facts: facts.to_vec(),
        zero_retrieval: false,
        plan: QueryPlan::default(),
    })
}
