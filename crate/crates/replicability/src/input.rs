//! CSV and JSON input documents.
//!
//! Two layouts are recognised from the column names:
//!
//! * `pvalues`: `dataset, p_value`, one row per dataset.
//! * `paired_scores`: `dataset, unit_id, score_a, score_b`, one row per
//!   evaluation unit, with an optional `gold` column for correlation tests.
//!
//! JSON input is either an array of row objects or an object
//!
//! ```json
//! { "kind": "paired_scores", "test": "wilcoxon",
//!   "test_params": { "alternative": "greater" },
//!   "rows": [ { "dataset": "news", "unit_id": 1, "score_a": 0.8, "score_b": 0.7 } ] }
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use replicability_core::{Alternative, ComparisonSet, Dependence};

use crate::paired::TestKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileFormat {
    Csv,
    Json,
}

impl FileFormat {
    /// `.json` files are JSON, everything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Pvalues,
    PairedScores,
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputKind::Pvalues => "pvalues",
            InputKind::PairedScores => "paired_scores",
        })
    }
}

/// Where a row came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line in a CSV file.
    Line(u64),
    /// 0-based index into a JSON row array.
    Row(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(l) => write!(f, "line {l}"),
            Location::Row(i) => write!(f, "rows[{i}]"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{}malformed CSV: {message}", location.map(|l| format!("{l}: ")).unwrap_or_default())]
    Csv {
        location: Option<Location>,
        message: String,
    },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("input has no data rows")]
    Empty,
    #[error(
        "unrecognised columns {found:?}: expected (dataset, p_value) or \
         (dataset, unit_id, score_a, score_b)"
    )]
    UnknownLayout { found: Vec<String> },
    #[error("{kind} input is missing required column `{column}`")]
    MissingColumn {
        column: &'static str,
        kind: InputKind,
    },
    #[error("declared kind `{declared}` does not match the columns, which look like `{found}`")]
    KindMismatch {
        declared: InputKind,
        found: InputKind,
    },
    #[error("{location}, column `{column}`: {message}")]
    Field {
        location: Location,
        column: &'static str,
        message: String,
    },
    #[error("{location}: dataset `{dataset}` appears more than once")]
    DuplicateDataset { location: Location, dataset: String },
    #[error("{location}: unit `{unit_id}` of dataset `{dataset}` appears more than once")]
    DuplicateUnit {
        location: Location,
        dataset: String,
        unit_id: String,
    },
    #[error(
        "{location}, column `{column}`: unit `{unit_id}` of dataset `{dataset}` has no score; \
         both systems must be scored on the same units"
    )]
    Unaligned {
        location: Location,
        column: &'static str,
        dataset: String,
        unit_id: String,
    },
    #[error("test_params: {0}")]
    Param(String),
}

type Result<T> = std::result::Result<T, InputError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PValueRow {
    pub dataset: String,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub unit_id: String,
    pub score_a: f64,
    pub score_b: f64,
    pub gold: Option<f64>,
}

/// All units of one dataset, in file order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreGroup {
    pub dataset: String,
    pub units: Vec<ScoreRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Payload {
    PValues(Vec<PValueRow>),
    /// Datasets in order of first appearance.
    PairedScores(Vec<ScoreGroup>),
}

/// Test settings a JSON document may carry; command-line flags override them.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TestParams {
    pub alternative: Option<Alternative>,
    pub bootstrap_size: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDocument {
    pub payload: Payload,
    pub declared_test: Option<TestKind>,
    pub test_params: TestParams,
}

impl InputDocument {
    pub fn kind(&self) -> InputKind {
        match self.payload {
            Payload::PValues(_) => InputKind::Pvalues,
            Payload::PairedScores(_) => InputKind::PairedScores,
        }
    }

    /// The p-values as a [`ComparisonSet`]; `None` for paired scores.
    pub fn comparison_set(
        &self,
        dependence: Dependence,
    ) -> Option<replicability_core::Result<ComparisonSet>> {
        match &self.payload {
            Payload::PValues(rows) => Some(ComparisonSet::new(
                rows.iter().map(|r| r.dataset.clone()).collect(),
                rows.iter().map(|r| r.p_value).collect(),
                dependence,
            )),
            Payload::PairedScores(_) => None,
        }
    }
}

pub fn parse_input(path: &Path, format: FileFormat) -> Result<InputDocument> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_str(&text, format)
}

pub fn parse_str(text: &str, format: FileFormat) -> Result<InputDocument> {
    match format {
        FileFormat::Csv => {
            let table = read_csv(text)?;
            build(table, None, None, TestParams::default())
        }
        FileFormat::Json => parse_json(text),
    }
}

#[derive(Debug)]
enum Cell {
    Text(String),
    Number(Number),
}

struct RawRow {
    location: Location,
    cells: HashMap<String, Cell>,
}

struct RawTable {
    columns: BTreeSet<String>,
    rows: Vec<RawRow>,
}

fn read_csv(text: &str) -> Result<RawTable> {
    let csv_error = |e: csv::Error| InputError::Csv {
        location: e.position().map(|p| Location::Line(p.line())),
        message: match e.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => {
                format!("expected {expected_len} fields, found {len}")
            }
            _ => e.to_string(),
        },
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_ascii_lowercase)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let cells = headers
            .iter()
            .zip(record.iter())
            .filter(|(_, v)| !v.is_empty())
            .map(|(h, v)| (h.clone(), Cell::Text(v.to_string())))
            .collect();
        rows.push(RawRow {
            location: Location::Line(line),
            cells,
        });
    }
    Ok(RawTable {
        columns: headers.into_iter().collect(),
        rows,
    })
}

fn parse_json(text: &str) -> Result<InputDocument> {
    let value: Value = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    let (rows, kind, test, params) = match value {
        Value::Array(rows) => (rows, None, None, TestParams::default()),
        Value::Object(mut doc) => {
            let rows = match doc.remove("rows") {
                Some(Value::Array(rows)) => rows,
                Some(_) => return Err(InputError::Json("`rows` must be an array".into())),
                None => return Err(InputError::Json("missing `rows` array".into())),
            };
            let kind = match doc.remove("kind") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(match s.as_str() {
                    "pvalues" => InputKind::Pvalues,
                    "paired_scores" => InputKind::PairedScores,
                    other => return Err(InputError::Json(format!("unknown kind `{other}`"))),
                }),
                Some(_) => return Err(InputError::Json("`kind` must be a string".into())),
            };
            let test = match doc.remove("test") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(
                    TestKind::from_str(&s, true)
                        .map_err(|_| InputError::Json(format!("unknown test `{s}`")))?,
                ),
                Some(_) => return Err(InputError::Json("`test` must be a string".into())),
            };
            let params = match doc.remove("test_params") {
                None | Some(Value::Null) => TestParams::default(),
                Some(Value::Object(map)) => test_params(map)?,
                Some(_) => return Err(InputError::Json("`test_params` must be an object".into())),
            };
            if let Some(key) = doc.keys().next() {
                return Err(InputError::Json(format!("unknown top-level key `{key}`")));
            }
            (rows, kind, test, params)
        }
        _ => {
            return Err(InputError::Json(
                "expected an array of rows or an object".into(),
            ))
        }
    };

    let mut columns = BTreeSet::new();
    let mut raw = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let Value::Object(map) = row else {
            return Err(InputError::Json(format!("rows[{i}] is not an object")));
        };
        let mut cells = HashMap::new();
        for (key, v) in map {
            let key = key.to_ascii_lowercase();
            columns.insert(key.clone());
            let cell = match v {
                Value::Null => continue,
                Value::String(s) if s.trim().is_empty() => continue,
                Value::String(s) => Cell::Text(s.trim().to_string()),
                Value::Number(n) => Cell::Number(n),
                other => {
                    return Err(InputError::Json(format!(
                        "rows[{i}].{key}: expected a string or number, found {other}"
                    )))
                }
            };
            cells.insert(key, cell);
        }
        raw.push(RawRow {
            location: Location::Row(i),
            cells,
        });
    }
    build(RawTable { columns, rows: raw }, kind, test, params)
}

fn test_params(map: Map<String, Value>) -> Result<TestParams> {
    let mut params = TestParams::default();
    let count = |name: &str, v: &Value| {
        v.as_u64()
            .ok_or_else(|| InputError::Param(format!("`{name}` must be a non-negative integer")))
    };
    for (key, v) in &map {
        match key.as_str() {
            "alternative" => {
                let s = v
                    .as_str()
                    .ok_or_else(|| InputError::Param("`alternative` must be a string".into()))?;
                params.alternative = Some(parse_alternative(s).ok_or_else(|| {
                    InputError::Param(format!(
                        "unknown alternative `{s}` (expected greater, less or two-sided)"
                    ))
                })?);
            }
            "bootstrap_size" => params.bootstrap_size = Some(count(key, v)? as usize),
            "reps" => params.reps = Some(count(key, v)? as usize),
            "seed" => params.seed = Some(count(key, v)?),
            other => {
                return Err(InputError::Param(format!(
                    "unknown parameter `{other}` (expected alternative, bootstrap_size, reps, seed)"
                )))
            }
        }
    }
    Ok(params)
}

/// Accepts `greater`, `less`, `two-sided` and `two_sided`.
pub fn parse_alternative(s: &str) -> Option<Alternative> {
    match s.to_ascii_lowercase().replace('_', "-").as_str() {
        "greater" => Some(Alternative::Greater),
        "less" => Some(Alternative::Less),
        "two-sided" => Some(Alternative::TwoSided),
        _ => None,
    }
}

impl RawRow {
    fn text(&self, column: &'static str) -> Option<String> {
        self.cells.get(column).map(|c| match c {
            Cell::Text(s) => s.clone(),
            Cell::Number(n) => n.to_string(),
        })
    }

    fn required_text(&self, column: &'static str) -> Result<String> {
        self.text(column).ok_or_else(|| InputError::Field {
            location: self.location,
            column,
            message: "value is empty".into(),
        })
    }

    fn number(&self, column: &'static str) -> Result<Option<f64>> {
        let Some(cell) = self.cells.get(column) else {
            return Ok(None);
        };
        let value = match cell {
            Cell::Number(n) => n.as_f64(),
            Cell::Text(s) => s.parse::<f64>().ok(),
        };
        match value {
            Some(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(InputError::Field {
                location: self.location,
                column,
                message: format!(
                    "`{}` is not a finite number",
                    self.text(column).unwrap_or_default()
                ),
            }),
        }
    }
}

fn require(table: &RawTable, kind: InputKind, columns: &[&'static str]) -> Result<()> {
    for &column in columns {
        if !table.columns.contains(column) {
            return Err(InputError::MissingColumn { column, kind });
        }
    }
    Ok(())
}

fn build(
    table: RawTable,
    declared: Option<InputKind>,
    declared_test: Option<TestKind>,
    test_params: TestParams,
) -> Result<InputDocument> {
    let detected = if table.columns.contains("p_value") {
        InputKind::Pvalues
    } else if table.columns.contains("score_a") || table.columns.contains("score_b") {
        InputKind::PairedScores
    } else if let Some(kind) = declared.filter(|_| table.rows.is_empty()) {
        kind
    } else if table.rows.is_empty() && table.columns.is_empty() {
        return Err(InputError::Empty);
    } else {
        return Err(InputError::UnknownLayout {
            found: table.columns.into_iter().collect(),
        });
    };
    if let Some(declared) = declared {
        if declared != detected {
            return Err(InputError::KindMismatch {
                declared,
                found: detected,
            });
        }
    }
    if table.rows.is_empty() {
        return Err(InputError::Empty);
    }
    let payload = match detected {
        InputKind::Pvalues => {
            require(&table, detected, &["dataset", "p_value"])?;
            Payload::PValues(pvalue_rows(&table)?)
        }
        InputKind::PairedScores => {
            require(
                &table,
                detected,
                &["dataset", "unit_id", "score_a", "score_b"],
            )?;
            Payload::PairedScores(score_groups(&table)?)
        }
    };
    Ok(InputDocument {
        payload,
        declared_test,
        test_params,
    })
}

fn pvalue_rows(table: &RawTable) -> Result<Vec<PValueRow>> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let dataset = row.required_text("dataset")?;
        let p_value = row.number("p_value")?.ok_or_else(|| InputError::Field {
            location: row.location,
            column: "p_value",
            message: "value is empty".into(),
        })?;
        if !(0.0..=1.0).contains(&p_value) {
            return Err(InputError::Field {
                location: row.location,
                column: "p_value",
                message: format!("{p_value} is outside [0, 1]"),
            });
        }
        if !seen.insert(dataset.clone()) {
            return Err(InputError::DuplicateDataset {
                location: row.location,
                dataset,
            });
        }
        out.push(PValueRow { dataset, p_value });
    }
    Ok(out)
}

fn score_groups(table: &RawTable) -> Result<Vec<ScoreGroup>> {
    let mut groups: Vec<ScoreGroup> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut units: BTreeMap<usize, HashSet<String>> = BTreeMap::new();
    for row in &table.rows {
        let dataset = row.required_text("dataset")?;
        let unit_id = row.required_text("unit_id")?;
        let score = |column: &'static str| -> Result<f64> {
            row.number(column)?.ok_or_else(|| InputError::Unaligned {
                location: row.location,
                column,
                dataset: dataset.clone(),
                unit_id: unit_id.clone(),
            })
        };
        let score_a = score("score_a")?;
        let score_b = score("score_b")?;
        let gold = row.number("gold")?;

        let g = *index.entry(dataset.clone()).or_insert_with(|| {
            groups.push(ScoreGroup {
                dataset: dataset.clone(),
                units: Vec::new(),
            });
            groups.len() - 1
        });
        if !units.entry(g).or_default().insert(unit_id.clone()) {
            return Err(InputError::DuplicateUnit {
                location: row.location,
                dataset,
                unit_id,
            });
        }
        groups[g].units.push(ScoreRow {
            unit_id,
            score_a,
            score_b,
            gold,
        });
    }
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_case_and_whitespace() {
        let doc = parse_str("Dataset , P_Value\n a , 0.5\nb,1e-3\n", FileFormat::Csv).unwrap();
        let Payload::PValues(rows) = doc.payload else {
            panic!("wrong kind")
        };
        assert_eq!(rows[0].dataset, "a");
        assert_eq!(rows[1].p_value, 1e-3);
    }

    #[test]
    fn json_numbers_become_ids() {
        let doc = parse_str(
            r#"[{"dataset": 3, "unit_id": 17, "score_a": 1, "score_b": 0.5}]"#,
            FileFormat::Json,
        )
        .unwrap();
        let Payload::PairedScores(groups) = doc.payload else {
            panic!("wrong kind")
        };
        assert_eq!(groups[0].dataset, "3");
        assert_eq!(groups[0].units[0].unit_id, "17");
    }

    #[test]
    fn alternative_spellings() {
        assert_eq!(parse_alternative("two_sided"), Some(Alternative::TwoSided));
        assert_eq!(parse_alternative("Two-Sided"), Some(Alternative::TwoSided));
        assert_eq!(parse_alternative("both"), None);
    }

    #[test]
    fn unequal_csv_rows_cite_line() {
        let err = parse_str("dataset,p_value\na,0.1\nb\n", FileFormat::Csv).unwrap_err();
        assert!(err.to_string().starts_with("line 3"), "{err}");
    }
}
