//! Closed label vocabularies: allergen categories, food pyramid groups,
//! seasons, diet restrictions and cuisines.
//!
//! The bundled data lives in `data/seed_categories.json` and
//! `data/cuisines.txt`; both can be replaced at run time.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::normalize_name;

const BUNDLED_SEED: &str = include_str!("../data/seed_categories.json");
const BUNDLED_CUISINES: &str = include_str!("../data/cuisines.txt");

pub const ALLERGEN_COUNT: usize = 14;
pub const SFP_COUNT: usize = 9;
pub const SEASON_COUNT: usize = 4;
pub const RESTRICTION_COUNT: usize = 18;

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("reading vocabulary file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing seed categories: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid vocabulary: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub code: u8,
    pub name: String,
}

#[derive(Debug, Deserialize)]
struct SeedFile {
    version: u32,
    allergens: Vec<Category>,
    sfp_categories: Vec<Category>,
    seasons: Vec<String>,
    diet_restrictions: Vec<String>,
    unrestricted: String,
    #[serde(default)]
    diet_implications: Vec<(String, String)>,
    #[serde(default)]
    religious_diets: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub allergens: Vec<Category>,
    pub sfp: Vec<Category>,
    pub seasons: Vec<String>,
    /// The 18 restriction labels, without `unrestricted`.
    pub restrictions: Vec<String>,
    pub unrestricted: String,
    /// `(a, b)`: a dish suitable for `a` is also suitable for `b`.
    pub implications: Vec<(String, String)>,
    pub religious: Vec<String>,
    pub cuisines: Vec<String>,
}

impl Vocabulary {
    pub fn bundled() -> &'static Vocabulary {
        static BUNDLED: OnceLock<Vocabulary> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            Vocabulary::parse(BUNDLED_SEED, BUNDLED_CUISINES).expect("bundled vocabulary is valid")
        })
    }

    pub fn load(seed_path: &Path, cuisines_path: &Path) -> Result<Self, VocabError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| VocabError::Io {
                path: p.display().to_string(),
                source,
            })
        };
        Self::parse(&read(seed_path)?, &read(cuisines_path)?)
    }

    pub fn parse(seed_json: &str, cuisines: &str) -> Result<Self, VocabError> {
        let seed: SeedFile = serde_json::from_str(seed_json)?;
        if seed.version != 1 {
            return Err(VocabError::Invalid(format!(
                "unsupported seed version {}",
                seed.version
            )));
        }
        let norm = |v: Vec<String>| {
            v.into_iter()
                .map(|s| normalize_name(&s))
                .collect::<Vec<_>>()
        };
        let vocab = Vocabulary {
            allergens: seed.allergens,
            sfp: seed.sfp_categories,
            seasons: norm(seed.seasons),
            restrictions: norm(seed.diet_restrictions),
            unrestricted: normalize_name(&seed.unrestricted),
            implications: seed
                .diet_implications
                .into_iter()
                .map(|(a, b)| (normalize_name(&a), normalize_name(&b)))
                .collect(),
            religious: norm(seed.religious_diets),
            cuisines: cuisines
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(normalize_name)
                .collect(),
        };
        vocab.check()?;
        Ok(vocab)
    }

    fn check(&self) -> Result<(), VocabError> {
        let codes_ok = |cats: &[Category], n: usize| {
            let codes: BTreeSet<u8> = cats.iter().map(|c| c.code).collect();
            cats.len() == n && codes == (1..=n as u8).collect()
        };
        if !codes_ok(&self.allergens, ALLERGEN_COUNT) {
            return Err(VocabError::Invalid(format!(
                "expected {ALLERGEN_COUNT} allergen categories coded 1..={ALLERGEN_COUNT}"
            )));
        }
        if !codes_ok(&self.sfp, SFP_COUNT) {
            return Err(VocabError::Invalid(format!(
                "expected {SFP_COUNT} food pyramid categories coded 1..={SFP_COUNT}"
            )));
        }
        let distinct = |v: &[String]| v.iter().collect::<BTreeSet<_>>().len() == v.len();
        if self.seasons.len() != SEASON_COUNT || !distinct(&self.seasons) {
            return Err(VocabError::Invalid(format!(
                "expected {SEASON_COUNT} seasons"
            )));
        }
        if self.restrictions.len() != RESTRICTION_COUNT
            || !distinct(&self.restrictions)
            || self.restrictions.contains(&self.unrestricted)
        {
            return Err(VocabError::Invalid(format!(
                "expected {RESTRICTION_COUNT} distinct diet restrictions besides `{}`",
                self.unrestricted
            )));
        }
        for (a, b) in &self.implications {
            if !self.is_restriction(a) || !self.is_restriction(b) {
                return Err(VocabError::Invalid(format!(
                    "implication {a} -> {b} names an unknown restriction"
                )));
            }
        }
        if self.cuisines.is_empty() || !distinct(&self.cuisines) {
            return Err(VocabError::Invalid(
                "cuisine list empty or has duplicates".into(),
            ));
        }
        Ok(())
    }

    /// All 19 diet labels: the restrictions followed by `unrestricted`.
    pub fn diet_labels(&self) -> impl Iterator<Item = &str> {
        self.restrictions
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(self.unrestricted.as_str()))
    }

    pub fn is_restriction(&self, id: &str) -> bool {
        self.restrictions.iter().any(|r| r == id)
    }

    pub fn is_diet(&self, id: &str) -> bool {
        id == self.unrestricted || self.is_restriction(id)
    }

    pub fn is_season(&self, s: &str) -> bool {
        self.seasons.iter().any(|x| x == s)
    }

    pub fn is_cuisine(&self, s: &str) -> bool {
        self.cuisines.iter().any(|x| x == s)
    }

    pub fn allergen(&self, code: u8) -> Option<&Category> {
        self.allergens.iter().find(|c| c.code == code)
    }

    pub fn sfp_category(&self, code: u8) -> Option<&Category> {
        self.sfp.iter().find(|c| c.code == code)
    }

    /// Apply the implication table until fixpoint.
    pub fn close_diets(&self, diets: &mut BTreeSet<String>) {
        loop {
            let before = diets.len();
            for (a, b) in &self.implications {
                if diets.contains(a) {
                    diets.insert(b.clone());
                }
            }
            if diets.len() == before {
                break;
            }
        }
    }
}
