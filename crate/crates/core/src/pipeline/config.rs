//! Run configuration, read from TOML. Relative paths resolve against the
//! directory holding the configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::enrich::GenerationConfig;
use crate::graphrag::RetrievalParams;
use crate::matching::MatchPolicy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub recipes: PathBuf,
    pub swiss: PathBuf,
    pub usda: PathBuf,
    pub gi: PathBuf,
    pub substitutions: PathBuf,
    /// Prompt-pack directory; the bundled pack when absent.
    #[serde(default)]
    pub prompts: Option<PathBuf>,
    /// Seed-category JSON; needs `cuisines` too.
    #[serde(default)]
    pub categories: Option<PathBuf>,
    #[serde(default)]
    pub cuisines: Option<PathBuf>,
    /// QA set evaluated at the end of a full run.
    #[serde(default)]
    pub qa: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChatSettings {
    pub endpoint: String,
    pub model: String,
    pub timeout_secs: u64,
    /// Replay file used in mock mode.
    pub transcript: Option<PathBuf>,
}

impl Default for ChatSettings {
    fn default() -> Self {
        ChatSettings {
            endpoint: "http://localhost:11434/api/chat".into(),
            model: "gemma3:27b".into(),
            timeout_secs: 300,
            transcript: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingSettings {
    pub endpoint: String,
    pub model: String,
    pub timeout_secs: u64,
    /// Pinned vectors for the mock embedder.
    pub pins: Option<PathBuf>,
}

impl Default for EmbeddingSettings {
    fn default() -> Self {
        EmbeddingSettings {
            endpoint: "http://localhost:11434/api/embed".into(),
            model: "mxbai-embed-large".into(),
            timeout_secs: 120,
            pins: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub work_dir: PathBuf,
    pub inputs: Inputs,
    #[serde(default)]
    pub chat: ChatSettings,
    #[serde(default)]
    pub embedding: EmbeddingSettings,
    #[serde(default)]
    pub generation: GenerationConfig,
    #[serde(default)]
    pub retrieval: RetrievalParams,
    #[serde(default)]
    pub matching: MatchPolicy,
    /// Replay chat from the transcript and embed with the hashing embedder.
    #[serde(default)]
    pub mock: bool,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
}

fn default_in_flight() -> usize {
    4
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl RunConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, PipelineError> {
        let mut c: RunConfig =
            toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        resolve(base, &mut c.work_dir);
        let i = &mut c.inputs;
        for p in [
            &mut i.recipes,
            &mut i.swiss,
            &mut i.usda,
            &mut i.gi,
            &mut i.substitutions,
        ] {
            resolve(base, p);
        }
        for p in [
            &mut i.prompts,
            &mut i.categories,
            &mut i.cuisines,
            &mut i.qa,
            &mut c.chat.transcript,
            &mut c.embedding.pins,
        ]
        .into_iter()
        .flatten()
        {
            resolve(base, p);
        }
        Ok(c)
    }

    /// Read, resolve and validate a configuration file.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let c = Self::parse(&text, base)?;
        c.validate()?;
        Ok(c)
    }

    /// Every referenced input exists; mock mode has a transcript.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let i = &self.inputs;
        let mut required: Vec<(&str, &Path)> = vec![
            ("inputs.recipes", &i.recipes),
            ("inputs.swiss", &i.swiss),
            ("inputs.usda", &i.usda),
            ("inputs.gi", &i.gi),
            ("inputs.substitutions", &i.substitutions),
        ];
        let optional = [
            ("inputs.prompts", &i.prompts),
            ("inputs.categories", &i.categories),
            ("inputs.cuisines", &i.cuisines),
            ("inputs.qa", &i.qa),
            ("chat.transcript", &self.chat.transcript),
            ("embedding.pins", &self.embedding.pins),
        ];
        required.extend(
            optional
                .iter()
                .filter_map(|(k, p)| p.as_deref().map(|p| (*k, p))),
        );
        for (key, path) in required {
            if !path.exists() {
                return Err(PipelineError::Config(format!(
                    "{key}: {} does not exist",
                    path.display()
                )));
            }
        }
        if i.categories.is_some() != i.cuisines.is_some() {
            return Err(PipelineError::Config(
                "inputs.categories and inputs.cuisines must be given together".into(),
            ));
        }
        if self.mock && self.chat.transcript.is_none() {
            return Err(PipelineError::Config(
                "mock mode needs chat.transcript".into(),
            ));
        }
        if self.max_in_flight == 0 {
            return Err(PipelineError::Config(
                "max_in_flight must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.work_dir.join(name)
    }
}
