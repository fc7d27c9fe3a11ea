//! LLM-backed enrichment: translation, ingredient-line splitting, label
//! mapping and recipe tagging over a pluggable chat backend.

mod backend;
mod config;
mod diets;
mod prompts;
mod runner;
mod structured;
mod tasks;

use thiserror::Error;

pub(crate) use backend::map_reqwest;
pub use backend::{
    extract_reply, prompt_hash, read_transcript, write_transcript, BackendError, ChatBackend,
    ChatMessage, HttpChatBackend, RecordingBackend, Role, ScriptedBackend, TranscriptBackend,
    TranscriptRecord,
};
pub use config::GenerationConfig;
pub use diets::{propagate_recipe_diets, DietFlags};
pub use prompts::{PromptPack, Task};
pub use runner::run_ordered;
pub use structured::{complete_structured, extract_json, Invalid, Structured};
pub use tasks::{Enricher, EnrichmentLabels, RecipeTags, SplitIngredient, TranslatedRecipe};

#[derive(Debug, Error)]
pub enum EnrichError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("invalid structured output after {attempts} attempts: {reason}")]
    SchemaViolation {
        attempts: u32,
        reason: String,
        raw: String,
    },
    #[error("label `{label}` outside the closed vocabulary after {attempts} attempts")]
    OutOfVocabulary {
        attempts: u32,
        label: String,
        raw: String,
    },
    #[error("{field}: expected {expected} items, model returned {got}")]
    StructuralMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("empty input")]
    EmptyInput,
    #[error("prompt pack: {0}")]
    PromptPack(String),
}

impl EnrichError {
    /// Model text behind a refused answer, when there is one.
    pub fn raw_output(&self) -> Option<&str> {
        match self {
            EnrichError::SchemaViolation { raw, .. } | EnrichError::OutOfVocabulary { raw, .. } => {
                Some(raw)
            }
            _ => None,
        }
    }
}
