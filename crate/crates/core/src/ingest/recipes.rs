use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::text::collapse_whitespace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Fr,
    De,
    It,
}

impl Language {
    pub fn name(self) -> &'static str {
        match self {
            Language::En => "English",
            Language::Fr => "French",
            Language::De => "German",
            Language::It => "Italian",
        }
    }
}

/// One record of `recipes.json` after structural validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecipe {
    #[serde(default)]
    pub id: Option<String>,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    pub language: Language,
    pub ingredient_lines: Vec<String>,
    pub instructions: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub utensils: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub nutrition: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cuisine: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub season: Option<String>,
}

impl RawRecipe {
    /// The assigned id; every recipe returned by the corpus parser has one.
    pub fn id(&self) -> &str {
        self.id.as_deref().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    InvalidIngredients,
    MissingInstructions,
    Malformed,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::InvalidIngredients => "invalid ingredients",
            RejectReason::MissingInstructions => "missing instructions",
            RejectReason::Malformed => "malformed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    /// Zero-based position in the input array.
    pub index: usize,
    pub name: Option<String>,
    pub reason: RejectReason,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusParse {
    pub recipes: Vec<RawRecipe>,
    pub rejected: Vec<Rejection>,
}

/// A line with no letter at all (only digits, punctuation or whitespace).
pub fn is_invalid_ingredient_line(line: &str) -> bool {
    !line.chars().any(char::is_alphabetic)
}

fn check(recipe: &RawRecipe) -> Result<(), (RejectReason, String)> {
    if recipe.name.trim().is_empty() {
        return Err((RejectReason::Malformed, "empty name".into()));
    }
    if recipe.ingredient_lines.is_empty() {
        return Err((
            RejectReason::InvalidIngredients,
            "no ingredient lines".into(),
        ));
    }
    if let Some(bad) = recipe
        .ingredient_lines
        .iter()
        .find(|l| is_invalid_ingredient_line(l))
    {
        return Err((
            RejectReason::InvalidIngredients,
            format!("ingredient line `{bad}` has no food name"),
        ));
    }
    if recipe.instructions.iter().all(|s| s.trim().is_empty()) {
        return Err((RejectReason::MissingInstructions, "no instructions".into()));
    }
    Ok(())
}

/// Parse a recipe corpus held in memory. Every array element ends up either
/// as a recipe or as a rejection.
pub fn parse_recipe_json(text: &str) -> Result<CorpusParse, IngestError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let serde_json::Value::Array(items) = value else {
        return Err(IngestError::NotAnArray);
    };
    let mut out = CorpusParse::default();
    let mut used_ids: HashSet<String> = HashSet::new();
    for (index, item) in items.into_iter().enumerate() {
        let name = item
            .get("name")
            .and_then(|n| n.as_str())
            .map(str::to_string);
        let reject = |reason, detail| Rejection {
            index,
            name: name.clone(),
            reason,
            detail,
        };
        let mut recipe: RawRecipe = match serde_json::from_value(item) {
            Ok(r) => r,
            Err(e) => {
                out.rejected
                    .push(reject(RejectReason::Malformed, e.to_string()));
                continue;
            }
        };
        if let Err((reason, detail)) = check(&recipe) {
            out.rejected.push(reject(reason, detail));
            continue;
        }
        recipe.instructions.retain(|s| !s.trim().is_empty());
        let base = recipe
            .id
            .clone()
            .filter(|s| !s.trim().is_empty())
            .unwrap_or_else(|| format!("recipe-{:04}", index + 1));
        let mut id = base.clone();
        let mut n = 2;
        while used_ids.contains(&id) {
            id = format!("{base}-{n}");
            n += 1;
        }
        used_ids.insert(id.clone());
        recipe.id = Some(id);
        out.recipes.push(recipe);
    }
    Ok(out)
}

pub fn parse_recipe_corpus(path: &Path) -> Result<CorpusParse, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_recipe_json(&text)
}

fn content_key(r: &RawRecipe) -> (String, Vec<String>, Vec<String>) {
    let norm = |s: &String| collapse_whitespace(&s.to_lowercase());
    (
        norm(&r.name),
        r.ingredient_lines.iter().map(norm).collect(),
        r.instructions.iter().map(norm).collect(),
    )
}

/// Drop exact duplicates (same name, ingredient lines and instructions after
/// case and whitespace normalization), keeping the first occurrence.
pub fn dedupe(recipes: Vec<RawRecipe>) -> Vec<RawRecipe> {
    let mut seen = HashSet::new();
    recipes
        .into_iter()
        .filter(|r| seen.insert(content_key(r)))
        .collect()
}
