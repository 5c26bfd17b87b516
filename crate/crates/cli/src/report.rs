use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Rounds to `digits` significant digits.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits.max(1) - 1, v).parse().unwrap_or(v)
}

/// A rectangular result table plus summary key/value pairs.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub config: Vec<(String, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn config(&mut self, key: &str, value: impl Into<Cell>) {
        self.config.push((key.to_string(), value.into()));
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn render(&self, format: Format, precision: usize) -> String {
        match format {
            Format::Tsv => self.delimited('\t', precision),
            Format::Csv => self.delimited(',', precision),
            Format::Json => self.json(precision),
        }
    }

    fn delimited(&self, sep: char, precision: usize) -> String {
        let mut out = String::new();
        let line = |cells: Vec<String>| cells.join(&sep.to_string());
        out.push_str(&line(self.columns.iter().map(|c| c.to_string()).collect()));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row.iter().map(|c| text(c, precision, sep)).collect()));
            out.push('\n');
        }
        for (key, value) in &self.summary {
            let _ = writeln!(out, "# {key}: {}", text(value, precision, ' '));
        }
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        out
    }

    fn json(&self, precision: usize) -> String {
        let object = |pairs: &[(String, Cell)]| {
            Value::Object(
                pairs
                    .iter()
                    .map(|(k, v)| (k.clone(), json_value(v, precision)))
                    .collect(),
            )
        };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), json_value(v, precision)))
                    .collect();
                Value::Object(map)
            })
            .collect();
        let mut summary = object(&self.summary);
        if !self.notes.is_empty() {
            summary["notes"] = Value::from(self.notes.clone());
        }
        let doc = serde_json::json!({
            "config": object(&self.config),
            "rows": rows,
            "summary": summary,
        });
        let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
        s.push('\n');
        s
    }
}

fn text(cell: &Cell, precision: usize, sep: char) -> String {
    match cell {
        Cell::Num(v) if v.is_finite() => round_sig(*v, precision).to_string(),
        Cell::Num(v) => v.to_string(),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) if s.contains(sep) || s.contains('"') => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Cell::Text(s) => s.clone(),
    }
}

fn json_value(cell: &Cell, precision: usize) -> Value {
    match cell {
        Cell::Num(v) => Number::from_f64(round_sig(*v, precision))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Cell::Int(v) => Value::from(*v),
        Cell::Bool(v) => Value::from(*v),
        Cell::Text(s) => Value::from(s.as_str()),
    }
}
