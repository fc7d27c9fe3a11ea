use serde::{Deserialize, Serialize};

/// Sampling settings sent with every chat request.
///
/// Defaults are fully deterministic: zero temperature, fixed seed, greedy
/// sampling, a 4096-token window and no reasoning mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub temperature: f64,
    pub seed: u64,
    pub num_ctx: u32,
    pub top_p: f64,
    pub top_k: u32,
    pub think: bool,
    /// Extra attempts after an invalid structured answer.
    pub max_retries: u32,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            temperature: 0.0,
            seed: 42,
            num_ctx: 4096,
            top_p: 0.0,
            top_k: 1,
            think: false,
            max_retries: 2,
        }
    }
}
