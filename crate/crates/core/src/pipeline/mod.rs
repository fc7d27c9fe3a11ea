//! The end-to-end pipeline: ingest, enrich, match, build the graph, embed
//! the fact index and evaluate. Every stage reads the previous stage's
//! artifact from the work directory and writes its own.

pub mod artifacts;
mod build;
mod config;
mod stages;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{add_labels, add_recipe, assemble, mentions};
pub use config::{ChatSettings, EmbeddingSettings, Inputs, RunConfig};
pub use stages::Pipeline;

use crate::enrich::{BackendError, EnrichError, GenerationConfig};
use crate::graphrag::{RagError, RetrievalParams};
use crate::ingest::IngestError;
use crate::kg::{GraphError, SnapshotError};
use crate::matching::{MatchError, MatchPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Ingest,
    Enrich,
    Match,
    Build,
    Index,
    Ask,
    Evaluate,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Enrich => "enrich",
            Stage::Match => "match",
            Stage::Build => "build-graph",
            Stage::Index => "embed-index",
            Stage::Ask => "ask",
            Stage::Evaluate => "evaluate",
            Stage::Report => "report",
        })
    }
}

#[derive(Debug, Error)]
pub enum StageCause {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Enrich(#[from] EnrichError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Rag(#[from] RagError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Artifact(String),
}

impl StageCause {
    fn io(path: &Path, e: std::io::Error) -> Self {
        StageCause::Io(format!("{}: {e}", path.display()))
    }

    fn backend(&self) -> Option<&BackendError> {
        match self {
            StageCause::Enrich(EnrichError::Backend(b))
            | StageCause::Match(MatchError::Embedder(b))
            | StageCause::Rag(RagError::Backend(b)) => Some(b),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("stage {stage} failed: {cause}")]
    Stage { stage: Stage, cause: StageCause },
}

impl PipelineError {
    /// Process exit code: 2 configuration, 4 unreachable backend, 3 any
    /// other stage failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Stage { cause, .. } => match cause.backend() {
                Some(BackendError::Unreachable(_)) => 4,
                _ => 3,
            },
        }
    }
}

/// Settings and per-stage counts of a run. Contains no timestamps or
/// absolute paths, so identical runs give identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub chat_model: String,
    pub embedding_model: String,
    pub generation: GenerationConfig,
    pub retrieval: RetrievalParams,
    pub matching: MatchPolicy,
    pub prompt_checksums: BTreeMap<String, String>,
    pub ingest: Option<serde_json::Value>,
    pub enrich: Option<serde_json::Value>,
    pub matching_counts: Option<serde_json::Value>,
    pub build: Option<serde_json::Value>,
    pub index: Option<serde_json::Value>,
    pub evaluation: Option<serde_json::Value>,
}
