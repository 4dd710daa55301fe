//! Deterministic CSV/JSON emission with a provenance header.

use crate::config::{Format, RunConfig};
use serde::Serialize;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Round-trip exact formatting with 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub command: String,
    pub config_sha256: String,
    pub model: String,
    pub parameters: String,
    pub tolerances: String,
}

impl Header {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Header {
            command: command.to_string(),
            config_sha256: cfg.hash(),
            model: cfg.model.to_string(),
            parameters: cfg.parameter_summary(),
            tolerances: cfg.tolerance_summary(),
        }
    }

    fn comment_lines(&self) -> String {
        format!(
            "# command: {}\n# config_sha256: {}\n# model: {}\n# parameters: {}\n# tolerances: {}\n",
            self.command, self.config_sha256, self.model, self.parameters, self.tolerances
        )
    }
}

/// A rectangular table; cells are preformatted strings.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    fn json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), cell_value(v)))
                    .collect::<serde_json::Map<_, _>>();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

fn cell_value(v: &str) -> Value {
    match v {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => {
            if let Ok(i) = v.parse::<i64>() {
                Value::from(i)
            } else {
                match v.parse::<f64>() {
                    Ok(x) if x.is_finite() => Value::from(x),
                    _ => Value::String(v.to_string()),
                }
            }
        }
    }
}

/// Renders a table (CSV) or a table plus an optional report (JSON).
pub fn render(header: &Header, table: &Table, report: Option<Value>, format: Format) -> String {
    match format {
        Format::Csv => format!("{}{}", header.comment_lines(), table.csv()),
        Format::Json => {
            let mut doc = json!({ "header": header, "rows": table.json() });
            if let Some(r) = report {
                doc["report"] = r;
            }
            let mut s = serde_json::to_string_pretty(&doc).expect("json document");
            s.push('\n');
            s
        }
    }
}

pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(text.as_bytes())?;
            w.flush()
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
