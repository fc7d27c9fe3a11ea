use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::MatchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub model: String,
    pub values: Vec<f64>,
}

impl EmbeddingVector {
    pub fn new(model: impl Into<String>, values: Vec<f64>) -> Self {
        EmbeddingVector {
            model: model.into(),
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }
}

/// Cosine similarity of two nonzero vectors from the same model.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, MatchError> {
    if a.model != b.model {
        return Err(MatchError::ModelMismatch {
            expected: a.model.clone(),
            found: b.model.clone(),
        });
    }
    if a.dim() != b.dim() {
        return Err(MatchError::LengthMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    cosine_values(&a.values, &b.values).ok_or(MatchError::ZeroVector)
}

/// Cosine of two equal-length slices; `None` when either is zero.
pub fn cosine_values(a: &[f64], b: &[f64]) -> Option<f64> {
    debug_assert_eq!(a.len(), b.len());
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Some((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Best-scoring keys of an index for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nearest {
    /// Entry positions sharing the top score, in index order.
    pub positions: Vec<usize>,
    pub keys: Vec<String>,
    pub score: f64,
}

impl Nearest {
    pub fn is_tie(&self) -> bool {
        self.keys.len() > 1
    }
}

/// Flat vector index scanned linearly. Keys are unique; all vectors share
/// one model tag and one dimension and none is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorIndex {
    model: String,
    dim: Option<usize>,
    entries: Vec<(String, EmbeddingVector)>,
    #[serde(skip)]
    keys: HashSet<String>,
}

impl VectorIndex {
    pub fn new(model: impl Into<String>) -> Self {
        VectorIndex {
            model: model.into(),
            dim: None,
            entries: Vec::new(),
            keys: HashSet::new(),
        }
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, EmbeddingVector)] {
        &self.entries
    }

    pub fn contains(&self, key: &str) -> bool {
        self.keys.contains(key)
    }

    pub fn insert(&mut self, key: impl Into<String>, v: EmbeddingVector) -> Result<(), MatchError> {
        let key = key.into();
        if v.model != self.model {
            return Err(MatchError::ModelMismatch {
                expected: self.model.clone(),
                found: v.model,
            });
        }
        if let Some(d) = self.dim {
            if d != v.dim() {
                return Err(MatchError::LengthMismatch {
                    left: d,
                    right: v.dim(),
                });
            }
        }
        if v.is_zero() {
            return Err(MatchError::ZeroVector);
        }
        if !self.keys.insert(key.clone()) {
            return Err(MatchError::DuplicateKey(key));
        }
        self.dim = Some(v.dim());
        self.entries.push((key, v));
        Ok(())
    }

    /// Similarity of `query` to every entry, in index order.
    pub fn scores(&self, query: &EmbeddingVector) -> Result<Vec<f64>, MatchError> {
        self.entries.iter().map(|(_, v)| cosine(query, v)).collect()
    }

    /// The entries with the highest similarity; exact ties are all kept.
    pub fn nearest(&self, query: &EmbeddingVector) -> Result<Nearest, MatchError> {
        if self.entries.is_empty() {
            return Err(MatchError::EmptyIndex);
        }
        let scores = self.scores(query)?;
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let positions: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] == best).collect();
        Ok(Nearest {
            keys: positions
                .iter()
                .map(|&i| self.entries[i].0.clone())
                .collect(),
            positions,
            score: best,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(values: &[f64]) -> EmbeddingVector {
        EmbeddingVector::new("m", values.to_vec())
    }

    #[test]
    fn cosine_cases() {
        let a = v(&[0.3, -1.2, 4.0]);
        assert!((cosine(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        let r = cosine(&v(&[1.0, 1.0, 0.0]), &v(&[1.0, 0.0, 0.0])).unwrap();
        assert!((r - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(matches!(
            cosine(&v(&[1.0]), &v(&[1.0, 0.0])),
            Err(MatchError::LengthMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(
            cosine(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])),
            Err(MatchError::ZeroVector)
        ));
        let other = EmbeddingVector::new("n", vec![1.0, 0.0]);
        assert!(matches!(
            cosine(&v(&[1.0, 0.0]), &other),
            Err(MatchError::ModelMismatch { .. })
        ));
    }

    #[test]
    fn index_invariants() {
        let mut idx = VectorIndex::new("m");
        idx.insert("a", v(&[1.0, 0.0])).unwrap();
        assert!(matches!(
            idx.insert("a", v(&[0.0, 1.0])),
            Err(MatchError::DuplicateKey(_))
        ));
        assert!(matches!(
            idx.insert("b", v(&[1.0])),
            Err(MatchError::LengthMismatch { .. })
        ));
        assert!(matches!(
            idx.insert("b", v(&[0.0, 0.0])),
            Err(MatchError::ZeroVector)
        ));
        assert_eq!(idx.len(), 1);
        assert!(matches!(
            VectorIndex::new("m").nearest(&v(&[1.0])),
            Err(MatchError::EmptyIndex)
        ));
    }

    #[test]
    fn nearest_and_ties() {
        let mut idx = VectorIndex::new("m");
        let q = v(&[1.0, 0.0]);
        // 0.9 and 0.2 similarity to q
        idx.insert("first", v(&[0.9, (1.0f64 - 0.81).sqrt()]))
            .unwrap();
        idx.insert("second", v(&[0.2, (1.0f64 - 0.04).sqrt()]))
            .unwrap();
        let n = idx.nearest(&q).unwrap();
        assert_eq!(n.keys, vec!["first"]);
        assert!((n.score - 0.9).abs() < 1e-12);

        let mut tie = VectorIndex::new("m");
        tie.insert("x", v(&[1.0, 1.0])).unwrap();
        tie.insert("y", v(&[1.0, -1.0])).unwrap();
        let n = tie.nearest(&q).unwrap();
        assert!(n.is_tie());
        assert_eq!(n.keys, vec!["x", "y"]);
    }
}
