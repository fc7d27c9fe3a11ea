use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::vector::EmbeddingVector;
use crate::enrich::BackendError;
use crate::text::{singularize_word, word_tokens};

pub trait Embedder: Send + Sync {
    /// Model tag stored with every vector.
    fn model(&self) -> &str;

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, BackendError>;

    fn embed_one(&self, text: &str) -> Result<EmbeddingVector, BackendError> {
        self.embed(&[text.to_string()])?
            .pop()
            .ok_or_else(|| BackendError::BadResponse("no embedding returned".into()))
    }
}

/// Embedding service over HTTP: request `{model, input: [...]}`.
#[derive(Debug, Clone)]
pub struct HttpEmbedder {
    endpoint: String,
    model: String,
    client: reqwest::blocking::Client,
    batch: usize,
}

impl HttpEmbedder {
    pub fn new(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        timeout: Duration,
    ) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| BackendError::Unreachable(e.to_string()))?;
        Ok(HttpEmbedder {
            endpoint: endpoint.into(),
            model: model.into(),
            client,
            batch: 64,
        })
    }
}

/// Vectors from `{"embeddings": [[..]]}`, `{"data": [{"embedding": [..]}]}`
/// or `{"embedding": [..]}` bodies.
pub fn extract_embeddings(body: &serde_json::Value) -> Option<Vec<Vec<f64>>> {
    let as_vec = |v: &serde_json::Value| -> Option<Vec<f64>> {
        v.as_array()?.iter().map(|x| x.as_f64()).collect()
    };
    if let Some(list) = body.get("embeddings").and_then(|v| v.as_array()) {
        return list.iter().map(as_vec).collect();
    }
    if let Some(list) = body.get("data").and_then(|v| v.as_array()) {
        return list
            .iter()
            .map(|d| d.get("embedding").and_then(as_vec))
            .collect();
    }
    body.get("embedding").and_then(as_vec).map(|v| vec![v])
}

impl Embedder for HttpEmbedder {
    fn model(&self) -> &str {
        &self.model
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, BackendError> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.batch) {
            let resp = self
                .client
                .post(&self.endpoint)
                .json(&serde_json::json!({"model": self.model, "input": chunk}))
                .send()
                .map_err(crate::enrich::map_reqwest)?;
            let status = resp.status();
            let text = resp.text().map_err(crate::enrich::map_reqwest)?;
            if !status.is_success() {
                return Err(BackendError::Http {
                    status: status.as_u16(),
                    body: text,
                });
            }
            let body: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| BackendError::BadResponse(e.to_string()))?;
            let vectors = extract_embeddings(&body)
                .filter(|v| v.len() == chunk.len())
                .ok_or_else(|| BackendError::BadResponse(text))?;
            out.extend(
                vectors
                    .into_iter()
                    .map(|v| EmbeddingVector::new(self.model.clone(), v)),
            );
        }
        Ok(out)
    }
}

pub const MOCK_DIM: usize = 256;
/// Dimensions at and above this one are never touched by token hashing.
pub const MOCK_HASHED_DIMS: usize = 248;

const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "do", "does", "for", "from", "how", "i", "in",
    "is", "it", "me", "of", "on", "or", "that", "the", "to", "what", "which", "with",
];

/// Break `CamelCase` words apart so kind names share tokens with prose.
fn split_camel_case(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 8);
    let mut prev_lower = false;
    for c in text.chars() {
        if prev_lower && c.is_uppercase() {
            out.push(' ');
        }
        prev_lower = c.is_lowercase();
        out.push(c);
    }
    out
}

/// A pinned text either gets a full vector or the unit vector on one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Pin {
    Axis { axis: usize },
    Vector(Vec<f64>),
}

/// Deterministic offline embedder. Each word token (lowercased, trailing
/// plural stripped, stopwords dropped) maps to a pseudo-random vector
/// derived from its SHA-256; a text is the sum of its token vectors.
/// Texts are not compared by meaning, only by shared words.
///
/// Hashed vectors use only the first [`MOCK_HASHED_DIMS`] dimensions, so a
/// text pinned to a higher axis is orthogonal to every unpinned text.
#[derive(Debug, Clone, Default)]
pub struct MockEmbedder {
    pins: BTreeMap<String, Pin>,
}

pub const MOCK_MODEL: &str = "mock-hash-256";

impl MockEmbedder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_pins(pins: BTreeMap<String, Pin>) -> Self {
        MockEmbedder { pins }
    }

    pub fn load_pins(path: &Path) -> Result<Self, BackendError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Transcript(format!("{}: {e}", path.display())))?;
        let pins = serde_json::from_str(&text)
            .map_err(|e| BackendError::Transcript(format!("{}: {e}", path.display())))?;
        Ok(Self::with_pins(pins))
    }

    pub fn pin(&mut self, text: impl Into<String>, pin: Pin) {
        self.pins.insert(text.into(), pin);
    }

    fn token_vector(token: &str, acc: &mut [f64]) {
        let mut filled = 0;
        let mut block = 0u32;
        while filled < MOCK_HASHED_DIMS {
            let mut h = Sha256::new();
            h.update(token.as_bytes());
            h.update([0x1f]);
            h.update(block.to_le_bytes());
            for b in h.finalize() {
                if filled == MOCK_HASHED_DIMS {
                    break;
                }
                acc[filled] += (f64::from(b) - 127.5) / 127.5;
                filled += 1;
            }
            block += 1;
        }
    }

    pub fn vector(&self, text: &str) -> Vec<f64> {
        let mut values = vec![0.0; MOCK_DIM];
        match self.pins.get(text) {
            Some(Pin::Axis { axis }) => {
                if let Some(v) = values.get_mut(*axis) {
                    *v = 1.0;
                }
            }
            Some(Pin::Vector(v)) => {
                for (dst, src) in values.iter_mut().zip(v) {
                    *dst = *src;
                }
            }
            None => {
                for token in word_tokens(&split_camel_case(text)) {
                    if STOPWORDS.contains(&token.as_str()) {
                        continue;
                    }
                    Self::token_vector(&singularize_word(&token), &mut values);
                }
            }
        }
        values
    }
}

impl Embedder for MockEmbedder {
    fn model(&self) -> &str {
        MOCK_MODEL
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, BackendError> {
        Ok(texts
            .iter()
            .map(|t| EmbeddingVector::new(MOCK_MODEL, self.vector(t)))
            .collect())
    }
}
