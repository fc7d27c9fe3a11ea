//! Parsing and validation of recipe corpora and reference tables.

mod quantity;
mod recipes;
mod tables;

use std::path::PathBuf;

use thiserror::Error;

pub use quantity::{canonical_unit, parse_number, split_amount};
pub use recipes::{
    dedupe, is_invalid_ingredient_line, parse_recipe_corpus, parse_recipe_json, CorpusParse,
    Language, RawRecipe, RejectReason, Rejection,
};
pub use tables::{
    detect_delimiter, load_gi_table, load_nutrient_db, load_substitutions, parse_gi_table,
    parse_nutrient_table, parse_ratio, parse_substitute, parse_substitutions, Component, GiEntry,
    NutrientEntry, NutrientSource, SkippedRow, Substitute, SubstituteOption, SubstitutionEntry,
    TableLoad, MAX_GI,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("recipe corpus: {0}")]
    Json(#[from] serde_json::Error),
    #[error("recipe corpus must be a JSON array of recipe objects")]
    NotAnArray,
    #[error("table is missing required column `{column}`")]
    MissingColumn { column: String },
    #[error("table: {0}")]
    Csv(#[from] csv::Error),
}
