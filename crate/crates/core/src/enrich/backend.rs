//! Chat-completion backends.
//!
//! [`HttpChatBackend`] speaks the JSON chat protocol of common local LLM
//! servers. [`TranscriptBackend`] replays canned answers keyed by a hash of
//! the whole conversation, and [`RecordingBackend`] writes such transcripts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::config::GenerationConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("backend unreachable: {0}")]
    Unreachable(String),
    #[error("backend returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("unexpected backend response: {0}")]
    BadResponse(String),
    #[error("no transcript entry for prompt hash {0}")]
    TranscriptMiss(String),
    #[error("transcript: {0}")]
    Transcript(String),
}

pub trait ChatBackend: Send + Sync {
    fn chat(&self, messages: &[ChatMessage]) -> Result<String, BackendError>;

    /// Model name reported in run reports.
    fn model(&self) -> &str;
}

/// Stable hash of a conversation: SHA-256 over `role 0x1f content 0x1e` for
/// every message, lowercase hex.
pub fn prompt_hash(messages: &[ChatMessage]) -> String {
    let mut h = Sha256::new();
    for m in messages {
        h.update(m.role.to_string().as_bytes());
        h.update([0x1f]);
        h.update(m.content.as_bytes());
        h.update([0x1e]);
    }
    hex::encode(h.finalize())
}

#[derive(Serialize)]
struct WireOptions {
    temperature: f64,
    seed: u64,
    top_p: f64,
    top_k: u32,
    num_ctx: u32,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    options: WireOptions,
    stream: bool,
    think: bool,
}

impl<'a> WireRequest<'a> {
    fn new(model: &'a str, messages: &'a [ChatMessage], c: &GenerationConfig) -> Self {
        WireRequest {
            model,
            messages,
            options: WireOptions {
                temperature: c.temperature,
                seed: c.seed,
                top_p: c.top_p,
                top_k: c.top_k,
                num_ctx: c.num_ctx,
            },
            stream: false,
            think: c.think,
        }
    }
}

/// Assistant text from either `{"message": {"content"}}`,
/// `{"choices": [{"message": {"content"}}]}` or `{"response"}` bodies.
pub fn extract_reply(body: &serde_json::Value) -> Option<String> {
    body.pointer("/message/content")
        .or_else(|| body.pointer("/choices/0/message/content"))
        .or_else(|| body.get("response"))
        .and_then(|v| v.as_str())
        .map(str::to_string)
}

pub(crate) fn map_reqwest(e: reqwest::Error) -> BackendError {
    if e.is_connect() || e.is_timeout() {
        BackendError::Unreachable(e.to_string())
    } else {
        BackendError::BadResponse(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct HttpChatBackend {
    endpoint: String,
    model: String,
    config: GenerationConfig,
    client: reqwest::blocking::Client,
}

impl HttpChatBackend {
    pub fn new(
        endpoint: impl Into<String>,
        model: impl Into<String>,
        config: GenerationConfig,
        timeout: Duration,
    ) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| BackendError::Unreachable(e.to_string()))?;
        Ok(HttpChatBackend {
            endpoint: endpoint.into(),
            model: model.into(),
            config,
            client,
        })
    }

    /// Serialized request body, exposed for protocol tests.
    pub fn request_body(&self, messages: &[ChatMessage]) -> serde_json::Value {
        serde_json::to_value(WireRequest::new(&self.model, messages, &self.config))
            .expect("request serializes")
    }
}

impl ChatBackend for HttpChatBackend {
    fn chat(&self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        let resp = self
            .client
            .post(&self.endpoint)
            .json(&WireRequest::new(&self.model, messages, &self.config))
            .send()
            .map_err(map_reqwest)?;
        let status = resp.status();
        let text = resp.text().map_err(map_reqwest)?;
        if !status.is_success() {
            return Err(BackendError::Http {
                status: status.as_u16(),
                body: text,
            });
        }
        let body: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| BackendError::BadResponse(e.to_string()))?;
        extract_reply(&body).ok_or_else(|| BackendError::BadResponse(text))
    }

    fn model(&self) -> &str {
        &self.model
    }
}

/// One line of a transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub prompt_hash: String,
    pub response: String,
    /// Last user message, kept only to make transcripts readable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user: Option<String>,
}

/// Replays answers from a JSON-lines transcript keyed by [`prompt_hash`].
#[derive(Debug, Clone, Default)]
pub struct TranscriptBackend {
    model: String,
    answers: HashMap<String, String>,
}

impl TranscriptBackend {
    pub fn from_records(model: impl Into<String>, records: Vec<TranscriptRecord>) -> Self {
        TranscriptBackend {
            model: model.into(),
            answers: records
                .into_iter()
                .map(|r| (r.prompt_hash, r.response))
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let records = read_transcript(path)?;
        let name = path
            .file_name()
            .unwrap_or(path.as_os_str())
            .to_string_lossy();
        Ok(Self::from_records(format!("mock:{name}"), records))
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }
}

pub fn read_transcript(path: &Path) -> Result<Vec<TranscriptRecord>, BackendError> {
    let file = std::fs::File::open(path)
        .map_err(|e| BackendError::Transcript(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| BackendError::Transcript(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| {
            BackendError::Transcript(format!("{} line {}: {e}", path.display(), i + 1))
        })?);
    }
    Ok(out)
}

pub fn write_transcript(path: &Path, records: &[TranscriptRecord]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

impl ChatBackend for TranscriptBackend {
    fn chat(&self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        let hash = prompt_hash(messages);
        self.answers
            .get(&hash)
            .cloned()
            .ok_or(BackendError::TranscriptMiss(hash))
    }

    fn model(&self) -> &str {
        &self.model
    }
}

/// Wraps a backend and keeps every exchange for [`write_transcript`].
pub struct RecordingBackend<B> {
    inner: B,
    records: Mutex<BTreeMap<String, TranscriptRecord>>,
}

impl<B: ChatBackend> RecordingBackend<B> {
    pub fn new(inner: B) -> Self {
        RecordingBackend {
            inner,
            records: Mutex::new(BTreeMap::new()),
        }
    }

    /// Records sorted by prompt hash.
    pub fn records(&self) -> Vec<TranscriptRecord> {
        self.records.lock().values().cloned().collect()
    }

    pub fn save(&self, path: &PathBuf) -> std::io::Result<()> {
        write_transcript(path, &self.records())
    }
}

impl<B: ChatBackend> ChatBackend for RecordingBackend<B> {
    fn chat(&self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        let response = self.inner.chat(messages)?;
        let hash = prompt_hash(messages);
        let user = messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map(|m| m.content.clone());
        self.records.lock().insert(
            hash.clone(),
            TranscriptRecord {
                prompt_hash: hash,
                response: response.clone(),
                user,
            },
        );
        Ok(response)
    }

    fn model(&self) -> &str {
        self.inner.model()
    }
}

type Script = dyn Fn(&[ChatMessage]) -> Result<String, BackendError> + Send + Sync;

/// Backend answering through a closure. Handy in tests.
pub struct ScriptedBackend {
    model: String,
    script: Box<Script>,
}

impl ScriptedBackend {
    pub fn new(
        model: impl Into<String>,
        script: impl Fn(&[ChatMessage]) -> Result<String, BackendError> + Send + Sync + 'static,
    ) -> Self {
        ScriptedBackend {
            model: model.into(),
            script: Box::new(script),
        }
    }

    /// Always answers with the same text.
    pub fn fixed(response: impl Into<String>) -> Self {
        let response = response.into();
        Self::new("fixed", move |_| Ok(response.clone()))
    }
}

impl ChatBackend for ScriptedBackend {
    fn chat(&self, messages: &[ChatMessage]) -> Result<String, BackendError> {
        (self.script)(messages)
    }

    fn model(&self) -> &str {
        &self.model
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn convo(user: &str) -> Vec<ChatMessage> {
        vec![ChatMessage::system("sys"), ChatMessage::user(user)]
    }

    #[test]
    fn hash_depends_on_roles_and_content() {
        let a = prompt_hash(&convo("x"));
        assert_eq!(a, prompt_hash(&convo("x")));
        assert_ne!(a, prompt_hash(&convo("y")));
        let swapped = vec![ChatMessage::user("sys"), ChatMessage::user("x")];
        assert_ne!(a, prompt_hash(&swapped));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.jsonl");
        let rec = RecordingBackend::new(ScriptedBackend::new("s", |m: &[ChatMessage]| {
            Ok(format!("echo {}", m.last().unwrap().content))
        }));
        rec.chat(&convo("one")).unwrap();
        rec.chat(&convo("two")).unwrap();
        rec.save(&path).unwrap();
        let replay = TranscriptBackend::load(&path).unwrap();
        assert_eq!(replay.len(), 2);
        assert_eq!(replay.chat(&convo("two")).unwrap(), "echo two");
        assert!(matches!(
            replay.chat(&convo("three")),
            Err(BackendError::TranscriptMiss(_))
        ));
    }

    #[test]
    fn wire_format() {
        let b = HttpChatBackend::new(
            "http://127.0.0.1:1/api/chat",
            "gemma3:27b",
            GenerationConfig::default(),
            Duration::from_secs(1),
        )
        .unwrap();
        let body = b.request_body(&convo("hi"));
        assert_eq!(body["model"], "gemma3:27b");
        assert_eq!(body["messages"][1]["role"], "user");
        assert_eq!(body["options"]["temperature"], 0.0);
        assert_eq!(body["options"]["top_k"], 1);
        assert_eq!(body["options"]["num_ctx"], 4096);
        assert_eq!(body["options"]["seed"], 42);
        assert_eq!(body["think"], false);
    }

    #[test]
    fn unreachable_server() {
        let b = HttpChatBackend::new(
            "http://127.0.0.1:1/api/chat",
            "m",
            GenerationConfig::default(),
            Duration::from_secs(2),
        )
        .unwrap();
        assert!(matches!(
            b.chat(&convo("hi")),
            Err(BackendError::Unreachable(_))
        ));
    }

    #[test]
    fn reply_shapes() {
        let ollama = serde_json::json!({"message": {"role": "assistant", "content": "a"}});
        let openai = serde_json::json!({"choices": [{"message": {"content": "b"}}]});
        let generate = serde_json::json!({"response": "c"});
        assert_eq!(extract_reply(&ollama).as_deref(), Some("a"));
        assert_eq!(extract_reply(&openai).as_deref(), Some("b"));
        assert_eq!(extract_reply(&generate).as_deref(), Some("c"));
        assert_eq!(extract_reply(&serde_json::json!({"x": 1})), None);
    }
}
