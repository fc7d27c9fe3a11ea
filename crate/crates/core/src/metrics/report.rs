use std::io::{self, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub id: String,
    pub score: f64,
    #[serde(default)]
    pub flags: Vec<String>,
}

/// Per-item scores for one task plus their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub task: String,
    pub rows: Vec<ScoreRow>,
}

impl MetricReport {
    pub fn new(task: impl Into<String>) -> Self {
        MetricReport {
            task: task.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, id: impl Into<String>, score: f64, flags: Vec<String>) {
        self.rows.push(ScoreRow {
            id: id.into(),
            score,
            flags,
        });
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Mean of the per-item scores; 0 for an empty report.
    pub fn aggregate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().map(|r| r.score).sum::<f64>() / self.rows.len() as f64
    }

    /// Tab separated: a task line, a column header, one row per item, and a
    /// final aggregate line. Scores are printed with six decimals.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# task\t{}", self.task)?;
        writeln!(out, "id\tscore\tflags")?;
        for row in &self.rows {
            writeln!(out, "{}\t{:.6}\t{}", row.id, row.score, row.flags.join(","))?;
        }
        writeln!(out, "# aggregate\t{:.6}\tn={}", self.aggregate(), self.n())
    }
}
