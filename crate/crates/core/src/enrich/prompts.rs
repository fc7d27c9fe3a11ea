//! Versioned system prompts, one text file per task.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::EnrichError;
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Translation,
    Splitting,
    Allergen,
    Sfp,
    Diets,
    Tagging,
    QueryPlan,
    Synthesis,
}

impl Task {
    pub const ALL: [Task; 8] = [
        Task::Translation,
        Task::Splitting,
        Task::Allergen,
        Task::Sfp,
        Task::Diets,
        Task::Tagging,
        Task::QueryPlan,
        Task::Synthesis,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            Task::Translation => "translation.txt",
            Task::Splitting => "splitting.txt",
            Task::Allergen => "allergen.txt",
            Task::Sfp => "sfp.txt",
            Task::Diets => "diets.txt",
            Task::Tagging => "tagging.txt",
            Task::QueryPlan => "query_plan.txt",
            Task::Synthesis => "synthesis.txt",
        }
    }

    fn bundled(self) -> &'static str {
        match self {
            Task::Translation => include_str!("../../prompts/translation.txt"),
            Task::Splitting => include_str!("../../prompts/splitting.txt"),
            Task::Allergen => include_str!("../../prompts/allergen.txt"),
            Task::Sfp => include_str!("../../prompts/sfp.txt"),
            Task::Diets => include_str!("../../prompts/diets.txt"),
            Task::Tagging => include_str!("../../prompts/tagging.txt"),
            Task::QueryPlan => include_str!("../../prompts/query_plan.txt"),
            Task::Synthesis => include_str!("../../prompts/synthesis.txt"),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_name().trim_end_matches(".txt"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptPack {
    templates: BTreeMap<Task, String>,
}

impl Default for PromptPack {
    fn default() -> Self {
        Self::bundled()
    }
}

impl PromptPack {
    pub fn bundled() -> Self {
        PromptPack {
            templates: Task::ALL
                .iter()
                .map(|t| (*t, t.bundled().to_string()))
                .collect(),
        }
    }

    /// Load every task file from `dir`; all eight must be present.
    pub fn load_dir(dir: &Path) -> Result<Self, EnrichError> {
        let mut templates = BTreeMap::new();
        for task in Task::ALL {
            let path = dir.join(task.file_name());
            let text = std::fs::read_to_string(&path)
                .map_err(|e| EnrichError::PromptPack(format!("{}: {e}", path.display())))?;
            templates.insert(task, text);
        }
        Ok(PromptPack { templates })
    }

    pub fn template(&self, task: Task) -> &str {
        &self.templates[&task]
    }

    /// SHA-256 of each template, keyed by task name.
    pub fn checksums(&self) -> BTreeMap<String, String> {
        self.templates
            .iter()
            .map(|(t, text)| (t.to_string(), hex::encode(Sha256::digest(text.as_bytes()))))
            .collect()
    }

    /// Template with vocabulary placeholders filled in.
    pub fn render(&self, task: Task, vocab: &Vocabulary) -> String {
        let numbered = |cats: &[crate::vocab::Category]| {
            cats.iter()
                .map(|c| format!("{}. {}", c.code, c.name))
                .collect::<Vec<_>>()
                .join("\n")
        };
        let listed = |items: &mut dyn Iterator<Item = &str>| {
            items
                .map(|s| format!("- {s}"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        self.template(task)
            .replace("{{allergens}}", &numbered(&vocab.allergens))
            .replace("{{sfp}}", &numbered(&vocab.sfp))
            .replace(
                "{{seasons}}",
                &listed(&mut vocab.seasons.iter().map(String::as_str)),
            )
            .replace("{{diets}}", &listed(&mut vocab.diet_labels()))
            .replace("{{cuisines}}", &vocab.cuisines.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_pack_renders_vocabularies() {
        let pack = PromptPack::bundled();
        let v = Vocabulary::bundled();
        let allergen = pack.render(Task::Allergen, v);
        assert!(allergen.contains("1. cereals containing gluten"));
        assert!(allergen.contains("14. molluscs"));
        assert!(!allergen.contains("{{"));
        let tagging = pack.render(Task::Tagging, v);
        assert!(tagging.contains("swiss"));
        assert!(tagging.contains("- unrestricted"));
        for task in Task::ALL {
            assert!(!pack.render(task, v).contains("{{"), "{task}");
        }
    }

    #[test]
    fn checksums_cover_every_task() {
        let sums = PromptPack::bundled().checksums();
        assert_eq!(sums.len(), 8);
        assert!(sums.values().all(|s| s.len() == 64));
    }

    #[test]
    fn load_dir_requires_all_files() {
        let dir = tempfile::tempdir().unwrap();
        assert!(PromptPack::load_dir(dir.path()).is_err());
        for task in Task::ALL {
            std::fs::write(dir.path().join(task.file_name()), format!("custom {task}")).unwrap();
        }
        let pack = PromptPack::load_dir(dir.path()).unwrap();
        assert_eq!(pack.template(Task::Sfp), "custom sfp");
        assert_ne!(pack.checksums(), PromptPack::bundled().checksums());
    }
}
