//! The enrichment operations, one structured completion each.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::backend::ChatBackend;
use super::diets::DietFlags;
use super::prompts::{PromptPack, Task};
use super::structured::{complete_structured, Invalid};
use super::{EnrichError, GenerationConfig};
use crate::ingest::{canonical_unit, parse_number, Language, RawRecipe};
use crate::text::{canonical_ingredient, collapse_whitespace, normalize_name, singularize_word};
use crate::vocab::Vocabulary;

/// One ingredient line split into its parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitIngredient {
    /// Lowercase singular food name; `None` for a line naming only tools.
    pub name: Option<String>,
    pub quantity: Option<f64>,
    pub unit: Option<String>,
    pub notes: Option<String>,
    pub utensils: Vec<String>,
}

impl SplitIngredient {
    pub fn is_utensil_only(&self) -> bool {
        self.name.is_none()
    }

    /// Fields in a fixed order for whole-record comparison; absent fields
    /// are empty.
    pub fn canonical_fields(&self) -> [String; 5] {
        [
            self.name.clone().unwrap_or_default(),
            self.quantity.map(|q| q.to_string()).unwrap_or_default(),
            self.unit.clone().unwrap_or_default(),
            self.notes.clone().unwrap_or_default(),
            self.utensils.join(", "),
        ]
    }
}

/// Labels for one ingredient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentLabels {
    /// Allergen category codes in 1..=14.
    pub allergens: BTreeSet<u8>,
    /// Food pyramid category code in 1..=9.
    pub sfp: Option<u8>,
    pub diets: DietFlags,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecipeTags {
    pub cuisine: Option<String>,
    pub seasons: BTreeSet<String>,
    pub diets: DietFlags,
}

/// English text of a recipe, item for item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslatedRecipe {
    pub name: String,
    pub ingredients: Vec<String>,
    pub instructions: Vec<String>,
}

#[derive(Deserialize)]
struct SplitReply {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    quantity: Option<serde_json::Value>,
    #[serde(default)]
    unit: Option<String>,
    #[serde(default)]
    notes: Option<String>,
    #[serde(default)]
    utensils: Vec<String>,
}

#[derive(Deserialize)]
struct AllergenReply {
    allergens: Vec<i64>,
}

#[derive(Deserialize)]
struct SfpReply {
    sfp: Option<i64>,
}

#[derive(Deserialize)]
struct DietsReply {
    suitable_for: Vec<String>,
}

#[derive(Deserialize)]
struct TagReply {
    #[serde(default)]
    cuisine: Option<String>,
    #[serde(default)]
    seasons: Vec<String>,
    #[serde(default)]
    diets: Vec<String>,
}

fn non_blank(s: Option<String>) -> Option<String> {
    s.map(|s| collapse_whitespace(&s)).filter(|s| {
        !s.is_empty() && !s.eq_ignore_ascii_case("null") && !s.eq_ignore_ascii_case("none")
    })
}

fn quantity_value(v: Option<serde_json::Value>) -> Result<Option<f64>, Invalid> {
    match v {
        None | Some(serde_json::Value::Null) => Ok(None),
        Some(serde_json::Value::Number(n)) => Ok(n.as_f64().filter(|q| q.is_finite() && *q >= 0.0)),
        Some(serde_json::Value::String(s)) if s.trim().is_empty() => Ok(None),
        Some(serde_json::Value::String(s)) => {
            let mut total = None;
            for word in s.split_whitespace() {
                let v = parse_number(word)
                    .ok_or_else(|| Invalid::Schema(format!("quantity `{s}` is not a number")))?;
                total = Some(total.unwrap_or(0.0) + v);
            }
            Ok(total)
        }
        Some(other) => Err(Invalid::Schema(format!(
            "quantity `{other}` is not a number"
        ))),
    }
}

fn check_split(reply: SplitReply) -> Result<SplitIngredient, Invalid> {
    let utensils: Vec<String> = reply
        .utensils
        .iter()
        .map(|u| canonical_ingredient(u))
        .filter(|u| !u.is_empty())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let name = non_blank(reply.name).and_then(|n| {
        let kept: Vec<String> = normalize_name(&n)
            .split(' ')
            .filter(|w| !utensils.iter().any(|u| *u == singularize_word(w)))
            .map(str::to_string)
            .collect();
        let name = canonical_ingredient(&kept.join(" "));
        (!name.is_empty()).then_some(name)
    });
    if name.is_none() && utensils.is_empty() {
        return Err(Invalid::Schema(
            "neither a food name nor a utensil was given".into(),
        ));
    }
    let unit = non_blank(reply.unit).map(|u| match canonical_unit(&u) {
        Some(c) => c.to_string(),
        None => singularize_word(&normalize_name(&u)),
    });
    Ok(SplitIngredient {
        name,
        quantity: quantity_value(reply.quantity)?,
        unit,
        notes: non_blank(reply.notes),
        utensils,
    })
}

fn check_allergens(reply: AllergenReply, vocab: &Vocabulary) -> Result<BTreeSet<u8>, Invalid> {
    reply
        .allergens
        .into_iter()
        .map(|c| {
            u8::try_from(c)
                .ok()
                .filter(|c| vocab.allergen(*c).is_some())
                .ok_or_else(|| Invalid::OutOfVocabulary(c.to_string()))
        })
        .collect()
}

fn check_sfp(reply: SfpReply, vocab: &Vocabulary) -> Result<Option<u8>, Invalid> {
    reply
        .sfp
        .map(|c| {
            u8::try_from(c)
                .ok()
                .filter(|c| vocab.sfp_category(*c).is_some())
                .ok_or_else(|| Invalid::OutOfVocabulary(c.to_string()))
        })
        .transpose()
}

fn check_diet_labels(labels: Vec<String>, vocab: &Vocabulary) -> Result<Vec<String>, Invalid> {
    labels
        .into_iter()
        .map(|l| {
            let n = normalize_name(&l);
            if vocab.is_diet(&n) {
                Ok(n)
            } else {
                Err(Invalid::OutOfVocabulary(l))
            }
        })
        .collect()
}

fn check_tags(reply: TagReply, vocab: &Vocabulary) -> Result<RecipeTags, Invalid> {
    let cuisine = match non_blank(reply.cuisine).map(|c| normalize_name(&c)) {
        Some(c) if !vocab.is_cuisine(&c) => return Err(Invalid::OutOfVocabulary(c)),
        other => other,
    };
    let seasons = reply
        .seasons
        .into_iter()
        .map(|s| {
            let n = normalize_name(&s);
            if vocab.is_season(&n) {
                Ok(n)
            } else {
                Err(Invalid::OutOfVocabulary(s))
            }
        })
        .collect::<Result<_, _>>()?;
    let diets = DietFlags::closed(check_diet_labels(reply.diets, vocab)?, vocab);
    Ok(RecipeTags {
        cuisine,
        seasons,
        diets,
    })
}

/// Runs each enrichment task against one backend with one prompt pack.
#[derive(Clone)]
pub struct Enricher {
    backend: Arc<dyn ChatBackend>,
    prompts: PromptPack,
    vocab: Arc<Vocabulary>,
    config: GenerationConfig,
}

impl Enricher {
    pub fn new(
        backend: Arc<dyn ChatBackend>,
        prompts: PromptPack,
        vocab: Arc<Vocabulary>,
        config: GenerationConfig,
    ) -> Self {
        Enricher {
            backend,
            prompts,
            vocab,
            config,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn backend(&self) -> &dyn ChatBackend {
        self.backend.as_ref()
    }

    pub fn prompts(&self) -> &PromptPack {
        &self.prompts
    }

    pub fn config(&self) -> &GenerationConfig {
        &self.config
    }

    fn ask<T, U>(
        &self,
        task: Task,
        user: &str,
        check: impl Fn(T) -> Result<U, Invalid>,
    ) -> Result<U, EnrichError>
    where
        T: serde::de::DeserializeOwned,
    {
        let system = self.prompts.render(task, &self.vocab);
        complete_structured(
            self.backend.as_ref(),
            &system,
            user,
            self.config.max_retries,
            check,
        )
        .map(|s| s.value)
    }

    /// English version of a recipe; English input is returned unchanged.
    /// A reply with a different number of items is refused.
    pub fn translate_recipe(&self, recipe: &RawRecipe) -> Result<RawRecipe, EnrichError> {
        if recipe.language == Language::En {
            return Ok(recipe.clone());
        }
        let user = serde_json::json!({
            "language": recipe.language.name(),
            "name": recipe.name,
            "ingredients": recipe.ingredient_lines,
            "instructions": recipe.instructions,
        })
        .to_string();
        let t: TranslatedRecipe = self.ask(Task::Translation, &user, |t: TranslatedRecipe| {
            if t.name.trim().is_empty() {
                Err(Invalid::Schema("empty recipe name".into()))
            } else {
                Ok(t)
            }
        })?;
        for (field, expected, got) in [
            (
                "ingredients",
                recipe.ingredient_lines.len(),
                t.ingredients.len(),
            ),
            (
                "instructions",
                recipe.instructions.len(),
                t.instructions.len(),
            ),
        ] {
            if expected != got {
                return Err(EnrichError::StructuralMismatch {
                    field,
                    expected,
                    got,
                });
            }
        }
        Ok(RawRecipe {
            name: t.name.trim().to_string(),
            ingredient_lines: t.ingredients,
            instructions: t.instructions,
            language: Language::En,
            ..recipe.clone()
        })
    }

    pub fn split_ingredient_line(&self, line: &str) -> Result<SplitIngredient, EnrichError> {
        let line = collapse_whitespace(line);
        if line.is_empty() {
            return Err(EnrichError::EmptyInput);
        }
        self.ask(Task::Splitting, &line, check_split)
    }

    pub fn map_allergens(&self, ingredient: &str) -> Result<BTreeSet<u8>, EnrichError> {
        let name = nonempty(ingredient)?;
        self.ask(Task::Allergen, &name, |r| check_allergens(r, &self.vocab))
    }

    pub fn map_sfp(&self, ingredient: &str) -> Result<Option<u8>, EnrichError> {
        let name = nonempty(ingredient)?;
        self.ask(Task::Sfp, &name, |r| check_sfp(r, &self.vocab))
    }

    /// Diet flags for one ingredient, closed under the implication table.
    /// The `diabetic` flag is taken from the model verbatim and comes with
    /// a low-confidence warning.
    pub fn map_diets(&self, ingredient: &str) -> Result<(DietFlags, Vec<String>), EnrichError> {
        let name = nonempty(ingredient)?;
        let labels = self.ask(Task::Diets, &name, |r: DietsReply| {
            check_diet_labels(r.suitable_for, &self.vocab)
        })?;
        let flags = DietFlags::closed(labels, &self.vocab);
        let warnings = if self.vocab.is_restriction("diabetic") {
            vec![format!("diabetic flag for `{name}` is low-confidence")]
        } else {
            Vec::new()
        };
        Ok((flags, warnings))
    }

    pub fn label_ingredient(&self, ingredient: &str) -> Result<EnrichmentLabels, EnrichError> {
        let (diets, warnings) = self.map_diets(ingredient)?;
        Ok(EnrichmentLabels {
            allergens: self.map_allergens(ingredient)?,
            sfp: self.map_sfp(ingredient)?,
            diets,
            warnings,
        })
    }

    /// Cuisine, seasons and diets for an English recipe. The cuisine stays
    /// absent unless the model names one.
    pub fn tag_recipe(
        &self,
        recipe: &RawRecipe,
        ingredient_names: &[String],
    ) -> Result<RecipeTags, EnrichError> {
        let mut input = serde_json::json!({
            "name": recipe.name,
            "description": recipe.description,
            "keywords": recipe.keywords,
            "ingredients": ingredient_names,
        });
        if let Some(c) = &recipe.cuisine {
            input["cuisine_hint"] = c.as_str().into();
        }
        if let Some(s) = &recipe.season {
            input["season_hint"] = s.as_str().into();
        }
        self.ask(Task::Tagging, &input.to_string(), |r| {
            check_tags(r, &self.vocab)
        })
    }
}

fn nonempty(s: &str) -> Result<String, EnrichError> {
    let n = normalize_name(s);
    if n.is_empty() {
        Err(EnrichError::EmptyInput)
    } else {
        Ok(n)
    }
}
