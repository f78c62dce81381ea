//! Row tables and run manifests.

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => match serde_json::Number::from_f64(*v) {
                Some(n) => n.to_string(),
                None => v.to_string(),
            },
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(v) => Value::String(v.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Real and imaginary parts as two adjacent cells.
pub fn complex(z: Complex64) -> [Cell; 2] {
    [Cell::Float(z.re), Cell::Float(z.im)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, csv::Error> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.into_inner().map_err(|e| e.into_error().into())
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            self.columns
                                .iter()
                                .zip(row)
                                .map(|(c, v)| (c.to_string(), v.json()))
                                .collect(),
                        )
                    })
                    .collect();
                let mut out = serde_json::to_vec_pretty(&rows).expect("table values serialize");
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

/// Table plus scalar results that do not fit the row schema.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub table: Option<Table>,
    pub summary: Map<String, Value>,
}

impl Report {
    pub fn new(table: Table) -> Self {
        Self {
            table: Some(table),
            summary: Map::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_owned(), value.into());
    }

    pub fn note_f64(&mut self, key: &str, value: f64) {
        self.note(
            key,
            serde_json::Number::from_f64(value).map_or(Value::Null, Value::Number),
        );
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    pub versions: String,
    pub outputs: Vec<String>,
    pub wall_time: f64,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub summary: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn versions() -> String {
    format!("yanglee-cli {}", env!("CARGO_PKG_VERSION"))
}
