//! Line-delimited JSON snapshots.
//!
//! The first line is a header carrying the format version; every following
//! line is one node or edge record. Nodes precede edges and both appear in
//! id order, so exporting the same graph always yields the same bytes.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::{Edge, Graph, GraphError, Node};

pub const SNAPSHOT_FORMAT: &str = "foodkg-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot io on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("snapshot line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("snapshot schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("snapshot line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: GraphError,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    seeded: bool,
    nodes: usize,
    edges: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record {
    Node(Node),
    Edge(Edge),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SnapshotError + '_ {
    move |source| SnapshotError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl Graph {
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = Header {
            format: SNAPSHOT_FORMAT.to_string(),
            version: SNAPSHOT_VERSION,
            seeded: self.is_seeded(),
            nodes: self.node_count(),
            edges: self.edge_count(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for n in self.nodes() {
            serde_json::to_writer(&mut out, &Record::Node(n.clone()))?;
            out.write_all(b"\n")?;
        }
        for e in self.edges() {
            serde_json::to_writer(&mut out, &Record::Edge(e.clone()))?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    /// Write the snapshot through a temp file and rename it into place.
    pub fn export_snapshot(&self, path: &Path) -> Result<(), SnapshotError> {
        let tmp = path.with_extension("tmp");
        let file = fs::File::create(&tmp).map_err(io_err(&tmp))?;
        self.write_snapshot(BufWriter::new(file))
            .map_err(io_err(&tmp))?;
        fs::rename(&tmp, path).map_err(io_err(path))
    }

    pub fn read_snapshot<R: BufRead>(input: R) -> Result<Graph, SnapshotError> {
        let mut lines = input.lines().enumerate();
        let parse_err = |line: usize, message: String| SnapshotError::Parse { line, message };
        let (_, first) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty snapshot".into()))?;
        let first = first.map_err(|e| parse_err(1, e.to_string()))?;
        let header: Header =
            serde_json::from_str(&first).map_err(|e| parse_err(1, format!("bad header: {e}")))?;
        if header.format != SNAPSHOT_FORMAT {
            return Err(parse_err(1, format!("unknown format `{}`", header.format)));
        }
        if header.version != SNAPSHOT_VERSION {
            return Err(SnapshotError::SchemaVersion {
                found: header.version,
                expected: SNAPSHOT_VERSION,
            });
        }
        let mut g = Graph::new();
        let mut seen_edge = false;
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: Record =
                serde_json::from_str(&line).map_err(|e| parse_err(lineno, e.to_string()))?;
            match record {
                Record::Node(n) => {
                    if seen_edge {
                        return Err(parse_err(lineno, "node record after edge records".into()));
                    }
                    g.restore_node(n).map_err(|source| SnapshotError::Invalid {
                        line: lineno,
                        source,
                    })?;
                }
                Record::Edge(e) => {
                    seen_edge = true;
                    g.insert_edge(e).map_err(|source| SnapshotError::Invalid {
                        line: lineno,
                        source,
                    })?;
                }
            }
        }
        if g.node_count() != header.nodes || g.edge_count() != header.edges {
            return Err(parse_err(
                1,
                format!(
                    "header announces {} nodes / {} edges, found {} / {}",
                    header.nodes,
                    header.edges,
                    g.node_count(),
                    g.edge_count()
                ),
            ));
        }
        g.set_seeded(header.seeded);
        Ok(g)
    }

    pub fn import_snapshot(path: &Path) -> Result<Graph, SnapshotError> {
        let file = fs::File::open(path).map_err(io_err(path))?;
        Graph::read_snapshot(BufReader::new(file))
    }
}
