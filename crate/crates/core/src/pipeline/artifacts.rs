//! Stage outputs written to the work directory.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::StageCause;
use crate::enrich::{DietFlags, EnrichmentLabels, RecipeTags, SplitIngredient};
use crate::ingest::{Language, RawRecipe, Rejection};
use crate::kg::{GraphStats, Props};
use crate::matching::{MatchResult, SubstitutionReport};

pub const INGEST_FILE: &str = "01_ingest.json";
pub const ENRICH_FILE: &str = "02_enrich.json";
pub const MATCH_FILE: &str = "03_match.json";
pub const BUILD_FILE: &str = "04_build.json";
pub const INDEX_FILE: &str = "05_index.json";
pub const EVAL_FILE: &str = "06_eval.json";
pub const SNAPSHOT_FILE: &str = "graph.snapshot.jsonl";
pub const FACTS_FILE: &str = "facts.index.jsonl";
pub const QA_REPORT_FILE: &str = "qa_report.tsv";
pub const RUN_REPORT_FILE: &str = "run_report.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestCounts {
    pub records: usize,
    pub kept: usize,
    pub rejected: BTreeMap<String, usize>,
    pub duplicates_removed: usize,
    pub swiss_rows: usize,
    pub usda_rows: usize,
    pub gi_rows: usize,
    pub substitution_entries: usize,
    pub skipped_table_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestArtifact {
    pub counts: IngestCounts,
    pub recipes: Vec<RawRecipe>,
    pub rejected: Vec<Rejection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichedLine {
    pub line: String,
    pub split: SplitIngredient,
}

/// An English recipe with split ingredient lines and tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalRecipe {
    pub id: String,
    pub name: String,
    pub source_language: Language,
    pub description: String,
    pub keywords: Vec<String>,
    /// Steps in order; step numbers are positions starting at 1.
    pub instructions: Vec<String>,
    pub lines: Vec<EnrichedLine>,
    pub utensils: Vec<String>,
    pub nutrition: BTreeMap<String, f64>,
    pub tags: RecipeTags,
    /// Intersection of ingredient diet flags plus `unrestricted`.
    pub diets: DietFlags,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl CanonicalRecipe {
    /// Food names of the non-utensil lines, in line order.
    pub fn ingredient_names(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().filter_map(|l| l.split.name.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrichFailure {
    pub item: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnrichCounts {
    pub recipes_in: usize,
    pub recipes_enriched: usize,
    pub recipes_failed: usize,
    pub translated: usize,
    pub lines_split: usize,
    pub utensil_only_lines: usize,
    pub ingredients: usize,
    pub ingredients_labeled: usize,
    pub ingredient_failures: usize,
    pub allergen_labels: usize,
    pub sfp_assigned: usize,
    pub ingredient_diet_labels: usize,
    pub recipe_diet_labels: usize,
    pub cuisines_assigned: usize,
    pub season_labels: usize,
    pub warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichArtifact {
    pub counts: EnrichCounts,
    pub recipes: Vec<CanonicalRecipe>,
    /// Labels per canonical ingredient name.
    pub labels: BTreeMap<String, EnrichmentLabels>,
    pub failures: Vec<EnrichFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedProps {
    pub result: MatchResult,
    pub props: Props,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngredientMatch {
    pub name: String,
    pub nutrients: Option<MatchedProps>,
    pub gi: Option<MatchedProps>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub ingredients: usize,
    /// Nutrient matches per ladder rung (`exact-swiss`, ...).
    pub ladder: BTreeMap<String, usize>,
    pub low_confidence: usize,
    pub ties: usize,
    pub gi_attached: usize,
    pub without_nutrients: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchArtifact {
    pub counts: MatchCounts,
    pub ingredients: Vec<IngredientMatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildArtifact {
    pub stats: GraphStats,
    pub substitutions: SubstitutionReport,
    pub instruction_uses: usize,
    pub issues: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexArtifact {
    pub model: String,
    pub dim: usize,
    pub facts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalArtifact {
    pub questions: usize,
    pub hits: usize,
    pub accuracy: f64,
    pub zero_retrieval: usize,
    pub errors: usize,
}

/// Pretty JSON plus a trailing newline, written through a temporary file.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), StageCause> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| StageCause::Artifact(format!("{}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), StageCause> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| StageCause::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(|e| StageCause::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| StageCause::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, StageCause> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        StageCause::Artifact(format!(
            "{}: {e}; run the earlier stages first",
            path.display()
        ))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| StageCause::Artifact(format!("{}: {e}", path.display())))
}
