//! Resolving ingredient names against nutrient, glycemic-index and
//! substitution tables, by exact name and then by embedding similarity.

mod embed;
mod ladder;
mod substitutes;
mod vector;

use thiserror::Error;

pub use embed::{
    extract_embeddings, Embedder, HttpEmbedder, MockEmbedder, Pin, MOCK_DIM, MOCK_HASHED_DIMS,
    MOCK_MODEL,
};
pub use ladder::{
    resolve, Catalog, GiMatcher, MatchMethod, MatchPolicy, MatchResult, MatchSource, NutrientMatch,
    NutrientMatcher,
};
pub use substitutes::{link_substitutes, SubstitutionReport, SUBSTITUTE_ONLY_PROP};
pub use vector::{cosine, cosine_values, EmbeddingVector, Nearest, VectorIndex};

use crate::enrich::BackendError;
use crate::kg::GraphError;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("embedding model mismatch: expected `{expected}`, found `{found}`")]
    ModelMismatch { expected: String, found: String },
    #[error("duplicate index key `{0}`")]
    DuplicateKey(String),
    #[error("index is empty")]
    EmptyIndex,
    #[error("both nutrient databases are empty")]
    EmptyDatabases,
    #[error(transparent)]
    Embedder(#[from] BackendError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
