//! Subcommands and their mapping to pipeline stages and exit codes.

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use foodkg_core::pipeline::{Pipeline, PipelineError, RunConfig};
use serde::Serialize;

use crate::api;

#[derive(Debug, Parser)]
#[command(
    name = "foodkg",
    version,
    about = "Build and query a food knowledge graph"
)]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "foodkg.toml")]
    pub config: PathBuf,
    /// Replay the chat transcript and use the hashing embedder.
    #[arg(long, global = true)]
    pub mock: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate the corpus and reference tables.
    Ingest,
    /// Translate, split, label and tag the ingested recipes.
    Enrich,
    /// Match nutrients and GI, then assemble and export the graph.
    BuildGraph,
    /// Embed every fact of the exported graph.
    EmbedIndex,
    /// Answer one question from the graph.
    Ask { question: String },
    /// Score a QA set and write the per-question report.
    Eval {
        #[arg(long)]
        qa: PathBuf,
    },
    /// Serve the JSON API over the built graph and index.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
    /// Print node and edge counts of the exported graph.
    Stats,
    /// Run every stage, then the configured QA set, then the report.
    Run,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError {
            code: e.exit_code(),
            message: e.to_string(),
        }
    }
}

impl CliError {
    fn stage(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

/// Load the configuration, applying the `--mock` override.
pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&cli.config)?;
    if cli.mock {
        config.mock = true;
        config.validate()?;
    }
    Ok(config)
}

fn print<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::stage(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| CliError::stage(e.to_string()))
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let pipeline = Pipeline::new(load_config(cli)?)?;
    match &cli.command {
        Command::Ingest => print(out, &pipeline.ingest()?.counts),
        Command::Enrich => print(out, &pipeline.enrich()?.counts),
        Command::BuildGraph => {
            let matched = pipeline.match_ingredients()?;
            let (_, build) = pipeline.build_graph()?;
            print(
                out,
                &serde_json::json!({"matching": matched.counts, "build": build}),
            )
        }
        Command::EmbedIndex => {
            let index = pipeline.embed_index()?;
            print(
                out,
                &serde_json::json!({"model": index.model, "dim": index.dim, "facts": index.facts.len()}),
            )
        }
        Command::Ask { question } => {
            let answer = pipeline.ask(question)?;
            print(
                out,
                &api::AskResponse {
                    answer: answer.answer,
                    facts: answer.facts,
                    zero_retrieval: answer.zero_retrieval,
                },
            )
        }
        Command::Eval { qa } => print(out, &pipeline.evaluate(qa)?),
        Command::Stats => print(out, &pipeline.load_graph()?.stats()),
        Command::Run => print(out, &pipeline.run()?),
        Command::Serve { port, host } => serve(&pipeline, SocketAddr::new(*host, *port)),
    }
}

fn serve(pipeline: &Pipeline, addr: SocketAddr) -> Result<(), CliError> {
    let rag = Arc::new(pipeline.rag()?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::stage(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::stage(format!("cannot listen on {addr}: {e}")))?;
        tracing::info!(%addr, "serving");
        axum::serve(listener, api::router(rag))
            .await
            .map_err(|e| CliError::stage(e.to_string()))
    })
}
