//! Structured (JSON) completions with validation and corrective retries.

use serde::de::DeserializeOwned;

use super::backend::{ChatBackend, ChatMessage};
use super::EnrichError;

/// Why a parsed answer was refused.
#[derive(Debug, Clone, PartialEq)]
pub enum Invalid {
    Schema(String),
    OutOfVocabulary(String),
}

impl Invalid {
    fn describe(&self) -> String {
        match self {
            Invalid::Schema(m) => m.clone(),
            Invalid::OutOfVocabulary(label) => format!("`{label}` is not an allowed label"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Structured<T> {
    pub value: T,
    /// Number of backend calls used, including the first.
    pub attempts: u32,
}

/// The JSON object or array inside a model reply, ignoring code fences and
/// surrounding prose.
pub fn extract_json(raw: &str) -> Option<&str> {
    let start = raw.find(['{', '['])?;
    let close = if raw[start..].starts_with('{') {
        '}'
    } else {
        ']'
    };
    let end = raw.rfind(close)?;
    (end > start).then(|| &raw[start..=end])
}

/// Ask for a JSON answer, parse it as `T` and run `check` on it.
///
/// Unknown fields are ignored and missing optional fields take their
/// defaults. A reply that does not parse or fails `check` is answered with a
/// corrective message, up to `max_retries` extra attempts. Backend errors
/// are returned at once.
pub fn complete_structured<T, U, F>(
    backend: &dyn ChatBackend,
    system: &str,
    user: &str,
    max_retries: u32,
    check: F,
) -> Result<Structured<U>, EnrichError>
where
    T: DeserializeOwned,
    F: Fn(T) -> Result<U, Invalid>,
{
    let mut messages = vec![ChatMessage::system(system), ChatMessage::user(user)];
    let mut attempts = 0;
    loop {
        attempts += 1;
        let raw = backend.chat(&messages)?;
        let outcome = match extract_json(&raw) {
            None => Err(Invalid::Schema("reply contains no JSON value".into())),
            Some(json) => serde_json::from_str::<T>(json)
                .map_err(|e| Invalid::Schema(e.to_string()))
                .and_then(&check),
        };
        match outcome {
            Ok(value) => return Ok(Structured { value, attempts }),
            Err(invalid) if attempts > max_retries => {
                return Err(match invalid {
                    Invalid::Schema(reason) => EnrichError::SchemaViolation {
                        attempts,
                        reason,
                        raw,
                    },
                    Invalid::OutOfVocabulary(label) => EnrichError::OutOfVocabulary {
                        attempts,
                        label,
                        raw,
                    },
                });
            }
            Err(invalid) => {
                let correction = format!(
                    "Your previous answer was invalid: {}. Reply again with only the JSON object in the required format.",
                    invalid.describe()
                );
                messages.push(ChatMessage::assistant(raw));
                messages.push(ChatMessage::user(correction));
            }
        }
    }
}
