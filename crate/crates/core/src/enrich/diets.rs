use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::vocab::Vocabulary;

/// The diet labels that hold, drawn from the 19 diet ids. `unrestricted`
/// is always present.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DietFlags(pub BTreeSet<String>);

impl DietFlags {
    /// Labels closed under the implication table, plus `unrestricted`.
    pub fn closed(labels: impl IntoIterator<Item = String>, vocab: &Vocabulary) -> Self {
        let mut set: BTreeSet<String> = labels.into_iter().collect();
        vocab.close_diets(&mut set);
        set.insert(vocab.unrestricted.clone());
        DietFlags(set)
    }

    pub fn holds(&self, label: &str) -> bool {
        self.0.contains(label)
    }

    /// One boolean per diet label, in vocabulary order.
    pub fn to_map(&self, vocab: &Vocabulary) -> BTreeMap<String, bool> {
        vocab
            .diet_labels()
            .map(|l| (l.to_string(), self.holds(l)))
            .collect()
    }

    pub fn restrictions<'a>(&'a self, vocab: &'a Vocabulary) -> impl Iterator<Item = &'a str> {
        self.0
            .iter()
            .map(String::as_str)
            .filter(|l| vocab.is_restriction(l))
    }
}

/// Recipe diet flags from its ingredients' flags.
///
/// Each restriction holds for the recipe iff it holds for every ingredient;
/// `unrestricted` always holds. The tag-level diets never override the
/// intersection for a restriction. With no ingredients every restriction
/// holds and a warning is returned.
pub fn propagate_recipe_diets(
    ingredients: &[DietFlags],
    vocab: &Vocabulary,
) -> (DietFlags, Option<String>) {
    let mut out = BTreeSet::new();
    for label in &vocab.restrictions {
        if ingredients.iter().all(|f| f.holds(label)) {
            out.insert(label.clone());
        }
    }
    out.insert(vocab.unrestricted.clone());
    let warning = ingredients
        .is_empty()
        .then(|| "recipe has no ingredients; every restriction holds vacuously".to_string());
    if let Some(w) = &warning {
        tracing::warn!("{w}");
    }
    (DietFlags(out), warning)
}
