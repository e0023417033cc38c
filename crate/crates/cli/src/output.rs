//! Deterministic CSV and JSON rendering.
//!
//! Floats are written in shortest round-trip form: `{:e}` in CSV, `ryu` via
//! `serde_json` in JSON. Metadata precedes the CSV header as `# key=value`
//! lines; summary values follow the rows in the same form.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if *v == 0.0 => "0e0".into(),
            Cell::Num(v) => format!("{v:e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, f64)>,
}

impl Report {
    pub fn new(metadata: Vec<(String, String)>, columns: Vec<&'static str>) -> Self {
        Self {
            metadata,
            columns,
            ..Default::default()
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("# summary {k}={v:e}\n"));
        }
        out
    }

    fn to_json(&self) -> String {
        let metadata: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("metadata".into(), Value::Object(metadata));
        doc.insert(
            "columns".into(),
            Value::Array(
                self.columns
                    .iter()
                    .map(|c| Value::String(c.to_string()))
                    .collect(),
            ),
        );
        doc.insert("rows".into(), Value::Array(rows));
        if !self.summary.is_empty() {
            let summary: Map<String, Value> = self
                .summary
                .iter()
                .map(|(k, v)| (k.to_string(), Cell::Num(*v).json()))
                .collect();
            doc.insert("summary".into(), Value::Object(summary));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
        text.push('\n');
        text
    }
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(vec![("command".into(), "scan".into())], vec!["x", "label"]);
        r.push_row(vec![Cell::Num(0.1), "a".into()]);
        r.push_row(vec![Cell::Num(-5.152332379969503e-29), "b".into()]);
        r.summary.push(("peak", 1.25));
        r
    }

    #[test]
    fn csv_layout() {
        let csv = sample().render(Format::Csv);
        assert_eq!(
            csv,
            "# command=scan\nx,label\n1e-1,a\n-5.152332379969503e-29,b\n# summary peak=1.25e0\n"
        );
    }

    #[test]
    fn csv_round_trips_floats() {
        for v in [0.1, 1.0 / 3.0, 7.903586518863498e6, -1e-300, f64::MAX] {
            let s = Cell::Num(v).csv();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_layout() {
        let json: Value = serde_json::from_str(&sample().render(Format::Json)).unwrap();
        assert_eq!(json["metadata"]["command"], "scan");
        assert_eq!(
            json["rows"][1]["x"].as_f64().unwrap(),
            -5.152332379969503e-29
        );
        assert_eq!(json["rows"][0]["label"], "a");
        assert_eq!(json["summary"]["peak"], 1.25);
    }
}
