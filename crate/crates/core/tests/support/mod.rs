//! Fixture locations and configuration shared by the integration tests.
#![allow(dead_code)]

pub mod oracle;

use std::path::{Path, PathBuf};

use foodkg_core::pipeline::RunConfig;

/// Question whose pinned embedding is orthogonal to every fact and whose
/// recorded plan is empty.
pub const OFF_TOPIC_QUESTION: &str = "What is the airspeed velocity of an unladen swallow?";

pub const TRANSCRIPT: &str = "chat.jsonl";
pub const PERTURBED_TRANSCRIPT: &str = "chat_perturbed.jsonl";

/// Questions whose answers are replaced in the perturbed transcript.
pub const PERTURBED_IDS: [&str; 4] = ["q003", "q008", "q013", "q018"];

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

/// The fixture run configuration, writing into `work` and replaying
/// `transcript`. Not validated, so it also serves before a transcript exists.
pub fn fixture_config(work: &Path, transcript: &str) -> RunConfig {
    let text = std::fs::read_to_string(fixture("run.toml")).unwrap();
    let mut config = RunConfig::parse(&text, &fixtures()).unwrap();
    config.work_dir = work.to_path_buf();
    config.chat.transcript = Some(fixture(transcript));
    config
}
