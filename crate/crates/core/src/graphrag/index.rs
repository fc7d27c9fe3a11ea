//! Embedded graph facts, persisted as versioned JSON lines.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RagError;
use crate::kg::{EdgeId, Graph};
use crate::matching::{Embedder, EmbeddingVector};

pub const INDEX_FORMAT: &str = "foodkg-fact-index";
pub const INDEX_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactEmbedding {
    pub edge: EdgeId,
    pub fact: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    model: String,
    dim: usize,
    facts: usize,
}

/// One embedded fact per graph edge, in edge-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct FactIndex {
    pub model: String,
    pub dim: usize,
    pub facts: Vec<FactEmbedding>,
}

impl FactIndex {
    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn vector(&self, i: usize) -> EmbeddingVector {
        EmbeddingVector::new(self.model.clone(), self.facts[i].vector.clone())
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = Header {
            format: INDEX_FORMAT.into(),
            version: INDEX_VERSION,
            model: self.model.clone(),
            dim: self.dim,
            facts: self.facts.len(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for f in &self.facts {
            serde_json::to_writer(&mut out, f)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn save(&self, path: &Path) -> Result<(), RagError> {
        let tmp = path.with_extension("tmp");
        let file = std::fs::File::create(&tmp).map_err(|e| RagError::io(&tmp, e))?;
        self.write(BufWriter::new(file))
            .map_err(|e| RagError::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| RagError::io(path, e))
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self, RagError> {
        let mut lines = input.lines();
        let bad = |line: usize, msg: String| RagError::IndexFormat { line, msg };
        let first = lines
            .next()
            .ok_or_else(|| bad(1, "missing header".into()))?
            .map_err(|e| bad(1, e.to_string()))?;
        let header: Header = serde_json::from_str(&first).map_err(|e| bad(1, e.to_string()))?;
        if header.format != INDEX_FORMAT || header.version != INDEX_VERSION {
            return Err(bad(
                1,
                format!("unsupported index {} v{}", header.format, header.version),
            ));
        }
        let mut facts = Vec::with_capacity(header.facts);
        for (i, line) in lines.enumerate() {
            let n = i + 2;
            let line = line.map_err(|e| bad(n, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let f: FactEmbedding =
                serde_json::from_str(&line).map_err(|e| bad(n, e.to_string()))?;
            if f.vector.len() != header.dim {
                return Err(bad(
                    n,
                    format!(
                        "vector has {} dims, expected {}",
                        f.vector.len(),
                        header.dim
                    ),
                ));
            }
            facts.push(f);
        }
        if facts.len() != header.facts {
            return Err(bad(
                0,
                format!(
                    "header announces {} facts, found {}",
                    header.facts,
                    facts.len()
                ),
            ));
        }
        Ok(FactIndex {
            model: header.model,
            dim: header.dim,
            facts,
        })
    }

    /// Load an index built with embedding model `model`.
    pub fn load(path: &Path, model: &str) -> Result<Self, RagError> {
        let file = std::fs::File::open(path).map_err(|e| RagError::io(path, e))?;
        let index = Self::read(BufReader::new(file))?;
        if index.model != model {
            return Err(RagError::StaleIndex(format!(
                "index built with `{}`, embedder is `{model}`",
                index.model
            )));
        }
        Ok(index)
    }

    /// Fail unless the index holds exactly the current facts of `graph`.
    pub fn check_against(&self, graph: &Graph) -> Result<(), RagError> {
        if self.facts.len() != graph.edge_count() {
            return Err(RagError::StaleIndex(format!(
                "index has {} facts, graph has {} edges",
                self.facts.len(),
                graph.edge_count()
            )));
        }
        for (f, e) in self.facts.iter().zip(graph.edges()) {
            if f.edge != e.id || graph.serialize_fact(e.id)? != f.fact {
                return Err(RagError::StaleIndex(format!(
                    "fact for edge {} changed",
                    e.id
                )));
            }
        }
        Ok(())
    }
}

/// Embed the serialized fact of every edge. Embedding failures discard the
/// whole index.
pub fn build_fact_index(graph: &Graph, embedder: &dyn Embedder) -> Result<FactIndex, RagError> {
    let mut edges = Vec::with_capacity(graph.edge_count());
    let mut texts = Vec::with_capacity(graph.edge_count());
    for e in graph.edges() {
        edges.push(e.id);
        texts.push(graph.serialize_fact(e.id)?);
    }
    let vectors = if texts.is_empty() {
        Vec::new()
    } else {
        embedder.embed(&texts)?
    };
    if vectors.len() != texts.len() {
        return Err(RagError::IndexFormat {
            line: 0,
            msg: format!(
                "embedder returned {} vectors for {} facts",
                vectors.len(),
                texts.len()
            ),
        });
    }
    let dim = vectors.first().map_or(0, EmbeddingVector::dim);
    let facts = edges
        .into_iter()
        .zip(texts)
        .zip(vectors)
        .map(|((edge, fact), v)| FactEmbedding {
            edge,
            fact,
            vector: v.values,
        })
        .collect();
    Ok(FactIndex {
        model: embedder.model().to_string(),
        dim,
        facts,
    })
}
