//! Name resolution against reference tables: exact match first, then
//! embedding nearest neighbour, tables tried in priority order.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::embed::Embedder;
use super::vector::{EmbeddingVector, VectorIndex};
use super::MatchError;
use crate::ingest::{GiEntry, NutrientEntry, NutrientSource};
use crate::kg::{PropValue, Props};
use crate::text::canonical_ingredient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchSource {
    Swiss,
    Usda,
    Gi,
    Subs,
}

impl From<NutrientSource> for MatchSource {
    fn from(s: NutrientSource) -> Self {
        match s {
            NutrientSource::Swiss => MatchSource::Swiss,
            NutrientSource::Usda => MatchSource::Usda,
        }
    }
}

impl fmt::Display for MatchSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchSource::Swiss => "swiss",
            MatchSource::Usda => "usda",
            MatchSource::Gi => "gi",
            MatchSource::Subs => "subs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMethod {
    Exact,
    Embedding,
}

impl fmt::Display for MatchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchMethod::Exact => "exact",
            MatchMethod::Embedding => "embedding",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub query: String,
    pub candidate: String,
    /// 1.0 for exact matches.
    pub score: f64,
    pub method: MatchMethod,
    pub source: MatchSource,
    /// Other candidates sharing the top score, for manual review.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tied: Vec<String>,
    pub low_confidence: bool,
    /// Row position of the candidate in its table.
    #[serde(skip)]
    pub position: usize,
}

impl MatchResult {
    /// Ladder step, `"exact-swiss"` style, used for run-report counts.
    pub fn rung(&self) -> String {
        format!("{}-{}", self.method, self.source)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchPolicy {
    /// Embedding matches below this score are kept but flagged.
    pub threshold: f64,
    /// Embedding matches below this score are discarded.
    pub floor: f64,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        MatchPolicy {
            threshold: 0.5,
            floor: 0.3,
        }
    }
}

/// The names of one reference table with exact and embedding lookups.
/// Duplicate names keep their first row.
#[derive(Debug, Clone)]
pub struct Catalog {
    source: MatchSource,
    names: Vec<String>,
    exact: HashMap<String, usize>,
    index: VectorIndex,
    /// Index entry position to table row.
    rows: Vec<usize>,
}

impl Catalog {
    pub fn build(
        source: MatchSource,
        names: Vec<String>,
        embedder: &dyn Embedder,
    ) -> Result<Self, MatchError> {
        let mut exact = HashMap::new();
        let mut unique = Vec::new();
        for (row, name) in names.iter().enumerate() {
            let key = canonical_ingredient(name);
            if !key.is_empty() && !exact.contains_key(&key) {
                exact.insert(key, row);
                unique.push(row);
            }
        }
        let texts: Vec<String> = unique.iter().map(|&r| names[r].clone()).collect();
        let vectors = if texts.is_empty() {
            Vec::new()
        } else {
            embedder.embed(&texts)?
        };
        let mut index = VectorIndex::new(embedder.model());
        let mut rows = Vec::new();
        for (row, v) in unique.into_iter().zip(vectors) {
            if v.is_zero() {
                continue;
            }
            index.insert(names[row].clone(), v)?;
            rows.push(row);
        }
        Ok(Catalog {
            source,
            names,
            exact,
            index,
            rows,
        })
    }

    pub fn source(&self) -> MatchSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn exact(&self, query: &str) -> Option<MatchResult> {
        let &row = self.exact.get(&canonical_ingredient(query))?;
        Some(MatchResult {
            query: query.to_string(),
            candidate: self.names[row].clone(),
            score: 1.0,
            method: MatchMethod::Exact,
            source: self.source,
            tied: Vec::new(),
            low_confidence: false,
            position: row,
        })
    }

    pub fn embedding(
        &self,
        query: &str,
        vector: &EmbeddingVector,
        policy: &MatchPolicy,
    ) -> Result<Option<MatchResult>, MatchError> {
        if self.index.is_empty() || vector.is_zero() {
            return Ok(None);
        }
        let nearest = self.index.nearest(vector)?;
        if nearest.score < policy.floor {
            return Ok(None);
        }
        let row = self.rows[nearest.positions[0]];
        Ok(Some(MatchResult {
            query: query.to_string(),
            candidate: self.names[row].clone(),
            score: nearest.score,
            method: MatchMethod::Embedding,
            source: self.source,
            tied: nearest.keys[1..].to_vec(),
            low_confidence: nearest.score < policy.threshold,
            position: row,
        }))
    }
}

/// Run the ladder over `catalogs` in priority order: every exact lookup,
/// then embedding lookups. The first embedding match at or above the
/// threshold wins; otherwise the best one above the floor is returned
/// flagged low-confidence, earlier catalogs winning ties.
pub fn resolve(
    query: &str,
    catalogs: &[&Catalog],
    embedder: &dyn Embedder,
    policy: &MatchPolicy,
) -> Result<Option<MatchResult>, MatchError> {
    if let Some(hit) = catalogs.iter().find_map(|c| c.exact(query)) {
        return Ok(Some(hit));
    }
    if catalogs.iter().all(|c| c.index.is_empty()) {
        return Ok(None);
    }
    let vector = embedder.embed_one(query)?;
    let mut fallback: Option<MatchResult> = None;
    for catalog in catalogs {
        if let Some(m) = catalog.embedding(query, &vector, policy)? {
            if !m.low_confidence {
                return Ok(Some(m));
            }
            if fallback.as_ref().is_none_or(|f| m.score > f.score) {
                fallback = Some(m);
            }
        }
    }
    Ok(fallback)
}

/// A resolved nutrient row.
#[derive(Debug, Clone, PartialEq)]
pub struct NutrientMatch<'a> {
    pub result: MatchResult,
    pub entry: &'a NutrientEntry,
}

impl NutrientMatch<'_> {
    /// Node props: every nutrient of the matched row plus provenance keys.
    pub fn props(&self) -> Props {
        let mut p: Props = self
            .entry
            .nutrients
            .iter()
            .map(|(k, v)| (k.clone(), PropValue::Number(*v)))
            .collect();
        p.insert(
            "nutrients_source".into(),
            self.entry.source.to_string().into(),
        );
        p.insert("nutrients_match".into(), self.entry.name.clone().into());
        p.insert(
            "nutrients_method".into(),
            self.result.method.to_string().into(),
        );
        p.insert("nutrients_score".into(), self.result.score.into());
        if self.result.low_confidence {
            p.insert("nutrients_low_confidence".into(), true.into());
        }
        p
    }
}

/// Swiss-first nutrient lookup.
#[derive(Debug, Clone)]
pub struct NutrientMatcher {
    swiss: Vec<NutrientEntry>,
    usda: Vec<NutrientEntry>,
    swiss_catalog: Catalog,
    usda_catalog: Catalog,
    policy: MatchPolicy,
}

impl NutrientMatcher {
    pub fn new(
        swiss: Vec<NutrientEntry>,
        usda: Vec<NutrientEntry>,
        embedder: &dyn Embedder,
        policy: MatchPolicy,
    ) -> Result<Self, MatchError> {
        if swiss.is_empty() && usda.is_empty() {
            return Err(MatchError::EmptyDatabases);
        }
        let names = |rows: &[NutrientEntry]| rows.iter().map(|e| e.name.clone()).collect();
        Ok(NutrientMatcher {
            swiss_catalog: Catalog::build(MatchSource::Swiss, names(&swiss), embedder)?,
            usda_catalog: Catalog::build(MatchSource::Usda, names(&usda), embedder)?,
            swiss,
            usda,
            policy,
        })
    }

    pub fn resolve_nutrients(
        &self,
        name: &str,
        embedder: &dyn Embedder,
    ) -> Result<Option<NutrientMatch<'_>>, MatchError> {
        let found = resolve(
            name,
            &[&self.swiss_catalog, &self.usda_catalog],
            embedder,
            &self.policy,
        )?;
        Ok(found.map(|result| {
            let table = match result.source {
                MatchSource::Usda => &self.usda,
                _ => &self.swiss,
            };
            NutrientMatch {
                entry: &table[result.position],
                result,
            }
        }))
    }
}

/// Glycemic-index lookup over one table.
#[derive(Debug, Clone)]
pub struct GiMatcher {
    entries: Vec<GiEntry>,
    catalog: Catalog,
    policy: MatchPolicy,
}

impl GiMatcher {
    pub fn new(
        entries: Vec<GiEntry>,
        embedder: &dyn Embedder,
        policy: MatchPolicy,
    ) -> Result<Self, MatchError> {
        let names = entries.iter().map(|e| e.name.clone()).collect();
        Ok(GiMatcher {
            catalog: Catalog::build(MatchSource::Gi, names, embedder)?,
            entries,
            policy,
        })
    }

    /// GI props for `name`, or `None` when nothing plausible matches.
    pub fn attach_gi(
        &self,
        name: &str,
        embedder: &dyn Embedder,
    ) -> Result<Option<(MatchResult, Props)>, MatchError> {
        let Some(result) = resolve(name, &[&self.catalog], embedder, &self.policy)? else {
            return Ok(None);
        };
        let entry = &self.entries[result.position];
        let mut p = Props::new();
        p.insert("gi".into(), entry.gi.into());
        p.insert("gi_match".into(), entry.name.clone().into());
        p.insert("gi_method".into(), result.method.to_string().into());
        p.insert("gi_score".into(), result.score.into());
        if result.low_confidence {
            p.insert("gi_low_confidence".into(), true.into());
        }
        Ok(Some((result, p)))
    }
}
