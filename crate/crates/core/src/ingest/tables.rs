//! Delimited nutrient, glycemic-index and substitution tables.
//!
//! All tables are UTF-8 with a header row. The delimiter (`;`, `,` or tab)
//! is detected from the header line. Numbers use a decimal point.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::quantity::split_amount;
use super::IngestError;
use crate::text::normalize_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NutrientSource {
    Swiss,
    Usda,
}

impl fmt::Display for NutrientSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NutrientSource::Swiss => "swiss",
            NutrientSource::Usda => "usda",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NutrientEntry {
    pub source: NutrientSource,
    pub name: String,
    /// Nutrient key to amount per 100 g.
    pub nutrients: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiEntry {
    pub name: String,
    pub gi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl Component {
    fn parse(text: &str) -> Option<Component> {
        let (quantity, unit, rest) = split_amount(text.trim());
        let name = normalize_name(&rest);
        (!name.is_empty()).then_some(Component {
            name,
            quantity,
            unit,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Substitute {
    Single(Component),
    Composite { components: Vec<Component> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstituteOption {
    pub substitute: Substitute,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionEntry {
    pub target: Component,
    pub options: Vec<SubstituteOption>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedRow {
    /// One-based line number in the file (the header is line 1).
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableLoad<T> {
    pub entries: Vec<T>,
    pub skipped: Vec<SkippedRow>,
}

impl<T> Default for TableLoad<T> {
    fn default() -> Self {
        TableLoad {
            entries: Vec::new(),
            skipped: Vec::new(),
        }
    }
}

pub fn detect_delimiter(header: &str) -> u8 {
    [b';', b'\t', b',']
        .into_iter()
        .max_by_key(|d| header.bytes().filter(|b| b == d).count())
        .filter(|d| header.as_bytes().contains(d))
        .unwrap_or(b',')
}

fn column_key(raw: &str) -> String {
    normalize_name(raw.trim_start_matches('\u{feff}')).replace(' ', "_")
}

/// Header positions plus the data rows as `(line number, fields)`.
struct Table {
    header: Vec<String>,
    rows: Vec<(usize, Result<Vec<String>, String>)>,
}

impl Table {
    fn parse(text: &str) -> Result<Table, IngestError> {
        let first = text.lines().next().unwrap_or_default();
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(detect_delimiter(first))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(column_key).collect();
        let width = header.len();
        let mut rows = Vec::new();
        for record in reader.records() {
            match record {
                Ok(rec) => {
                    let line = rec.position().map_or(0, |p| p.line() as usize);
                    if rec.iter().all(|f| f.is_empty()) {
                        continue;
                    }
                    if rec.len() != width {
                        rows.push((
                            line,
                            Err(format!("expected {width} fields, found {}", rec.len())),
                        ));
                    } else {
                        rows.push((line, Ok(rec.iter().map(str::to_string).collect())));
                    }
                }
                Err(e) => {
                    let line = e.position().map_or(0, |p| p.line() as usize);
                    rows.push((line, Err(e.to_string())));
                }
            }
        }
        Ok(Table { header, rows })
    }

    fn column(&self, names: &[&str]) -> Option<usize> {
        self.header.iter().position(|h| names.contains(&h.as_str()))
    }

    fn require(&self, names: &[&str]) -> Result<usize, IngestError> {
        self.column(names)
            .ok_or_else(|| IngestError::MissingColumn {
                column: names[0].to_string(),
            })
    }
}

fn parse_amount(raw: &str) -> Result<Option<f64>, String> {
    if raw.is_empty() {
        return Ok(None);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
        Ok(v) => Err(format!("value {v} is negative or not finite")),
        Err(_) => Err(format!("unparseable number `{raw}`")),
    }
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

const NAME_COLUMNS: &[&str] = &["name", "food", "food_name"];

/// Nutrient table: a `name` column, an optional `id` column, and one column
/// per nutrient key holding the amount per 100 g. Empty cells mean "not
/// reported"; unparseable or negative values skip the whole row.
pub fn parse_nutrient_table(
    text: &str,
    source: NutrientSource,
) -> Result<TableLoad<NutrientEntry>, IngestError> {
    let table = Table::parse(text)?;
    let name_col = table.require(NAME_COLUMNS)?;
    let id_col = table.column(&["id"]);
    let mut out = TableLoad::default();
    for (line, row) in table.rows.iter() {
        let fields = match row {
            Ok(f) => f,
            Err(reason) => {
                out.skipped.push(SkippedRow {
                    line: *line,
                    reason: reason.clone(),
                });
                continue;
            }
        };
        let name = fields[name_col].trim();
        if name.is_empty() {
            out.skipped.push(SkippedRow {
                line: *line,
                reason: "empty name".into(),
            });
            continue;
        }
        let mut nutrients = BTreeMap::new();
        let mut bad = None;
        for (col, key) in table.header.iter().enumerate() {
            if col == name_col || Some(col) == id_col {
                continue;
            }
            match parse_amount(&fields[col]) {
                Ok(Some(v)) => {
                    nutrients.insert(key.clone(), v);
                }
                Ok(None) => {}
                Err(e) => {
                    bad = Some(format!("{key}: {e}"));
                    break;
                }
            }
        }
        match bad {
            Some(reason) => out.skipped.push(SkippedRow {
                line: *line,
                reason,
            }),
            None => out.entries.push(NutrientEntry {
                source,
                name: name.to_string(),
                nutrients,
            }),
        }
    }
    Ok(out)
}

pub fn load_nutrient_db(
    path: &Path,
    source: NutrientSource,
) -> Result<TableLoad<NutrientEntry>, IngestError> {
    parse_nutrient_table(&read(path)?, source)
}

pub const MAX_GI: f64 = 150.0;

/// Glycemic-index table with `name` and `gi` columns.
pub fn parse_gi_table(text: &str) -> Result<TableLoad<GiEntry>, IngestError> {
    let table = Table::parse(text)?;
    let name_col = table.require(NAME_COLUMNS)?;
    let gi_col = table.require(&["gi", "glycemic_index"])?;
    let mut out = TableLoad::default();
    for (line, row) in &table.rows {
        let parsed = row.clone().and_then(|f| {
            let name = f[name_col].trim().to_string();
            if name.is_empty() {
                return Err("empty name".to_string());
            }
            match parse_amount(&f[gi_col])? {
                Some(gi) if gi <= MAX_GI => Ok(GiEntry { name, gi }),
                Some(gi) => Err(format!("gi {gi} outside [0, {MAX_GI}]")),
                None => Err("missing gi".to_string()),
            }
        });
        match parsed {
            Ok(e) => out.entries.push(e),
            Err(reason) => out.skipped.push(SkippedRow {
                line: *line,
                reason,
            }),
        }
    }
    Ok(out)
}

pub fn load_gi_table(path: &Path) -> Result<TableLoad<GiEntry>, IngestError> {
    parse_gi_table(&read(path)?)
}

/// `1:1` style or plain decimal ratio.
pub fn parse_ratio(raw: &str) -> Result<Option<f64>, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    let value = match raw.split_once(':') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad ratio `{raw}`"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad ratio `{raw}`"))?;
            if b == 0.0 {
                return Err(format!("bad ratio `{raw}`"));
            }
            a / b
        }
        None => raw.parse().map_err(|_| format!("bad ratio `{raw}`"))?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(Some(value))
    } else {
        Err(format!("ratio `{raw}` must be positive"))
    }
}

/// Parse a substitute cell: `margarine`, or a composite joined by `+` such
/// as `1 cup milk + 1 tbsp lemon juice`.
pub fn parse_substitute(cell: &str) -> Option<Substitute> {
    let parts: Vec<&str> = cell.split('+').map(str::trim).collect();
    let components: Option<Vec<Component>> = parts.iter().map(|p| Component::parse(p)).collect();
    let mut components = components?;
    match components.len() {
        0 => None,
        1 => Some(Substitute::Single(components.remove(0))),
        _ => Some(Substitute::Composite { components }),
    }
}

/// Substitution table with `target` and `substitute` columns and optional
/// `ratio` and `notes`. Rows sharing a target are merged into one entry, in
/// first-appearance order.
pub fn parse_substitutions(text: &str) -> Result<TableLoad<SubstitutionEntry>, IngestError> {
    let table = Table::parse(text)?;
    let target_col = table.require(&["target", "ingredient"])?;
    let sub_col = table.require(&["substitute", "substitutes"])?;
    let ratio_col = table.column(&["ratio"]);
    let notes_col = table.column(&["notes", "note"]);
    let mut out: TableLoad<SubstitutionEntry> = TableLoad::default();
    for (line, row) in &table.rows {
        let parsed = row.clone().and_then(|f| {
            let target = Component::parse(&f[target_col]).ok_or("empty target")?;
            let substitute = parse_substitute(&f[sub_col]).ok_or("empty substitute")?;
            let ratio = match ratio_col {
                Some(c) => parse_ratio(&f[c])?,
                None => None,
            };
            let notes = notes_col
                .map(|c| f[c].trim().to_string())
                .filter(|s| !s.is_empty());
            Ok::<_, String>((
                target,
                SubstituteOption {
                    substitute,
                    ratio,
                    notes,
                },
            ))
        });
        match parsed {
            Ok((target, option)) => {
                match out
                    .entries
                    .iter_mut()
                    .find(|e| e.target.name == target.name)
                {
                    Some(entry) => entry.options.push(option),
                    None => out.entries.push(SubstitutionEntry {
                        target,
                        options: vec![option],
                    }),
                }
            }
            Err(reason) => out.skipped.push(SkippedRow {
                line: *line,
                reason,
            }),
        }
    }
    Ok(out)
}

pub fn load_substitutions(path: &Path) -> Result<TableLoad<SubstitutionEntry>, IngestError> {
    parse_substitutions(&read(path)?)
}
