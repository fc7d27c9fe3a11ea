#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use foodkg_core::graphrag::GraphRag;
use foodkg_core::pipeline::{Pipeline, RunConfig};

pub fn core_fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

/// A mock-mode configuration file inside `dir` pointing at the core fixtures.
pub fn write_config(dir: &Path) -> PathBuf {
    let f = core_fixtures();
    let text = format!(
        r#"work_dir = "{work}"
mock = true

[inputs]
recipes = "{f}/recipes.json"
swiss = "{f}/swiss.csv"
usda = "{f}/usda.csv"
gi = "{f}/gi.csv"
substitutions = "{f}/subs.csv"
qa = "{f}/qa.jsonl"

[chat]
transcript = "{f}/chat.jsonl"

[embedding]
pins = "{f}/embed_pins.json"
"#,
        work = dir.join("work").display(),
        f = f.display(),
    );
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

/// Run the whole fixture pipeline in `dir` and open the question service.
pub fn built_rag(dir: &Path) -> Arc<GraphRag> {
    let config = RunConfig::load(&write_config(dir)).unwrap();
    let pipeline = Pipeline::new(config).unwrap();
    pipeline.run().unwrap();
    Arc::new(pipeline.rag().unwrap())
}
