//! Food knowledge graph toolkit.
//!
//! The crate is organised as a pipeline:
//!
//! * [`ingest`] parses recipe corpora and the nutrient, glycemic-index and
//!   substitution tables into canonical records.
//! * [`enrich`] runs the LLM-backed enrichment tasks (translation, ingredient
//!   splitting, allergen / food-pyramid / diet mapping, recipe tagging) under a
//!   deterministic generation contract.
//! * [`matching`] resolves ingredient names against the nutrient databases with
//!   an exact-then-embedding ladder.
//! * [`kg`] is the typed property graph that enforces the food ontology.
//! * [`graphrag`] answers questions over serialized graph facts.
//! * [`metrics`] holds the evaluation formulas used to benchmark every stage.
//! * [`pipeline`] wires the stages together behind a run configuration.

pub mod enrich;
pub mod graphrag;
pub mod ingest;
pub mod kg;
pub mod matching;
pub mod metrics;
pub mod pipeline;
pub mod text;
pub mod vocab;

pub use kg::{Edge, EdgeId, EdgeKind, Graph, Node, NodeId, NodeKind, PropValue, Props};
pub use vocab::Vocabulary;
