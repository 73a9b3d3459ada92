//! Tables and their serialization to CSV or JSON lines.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliResult;
use crate::scenario::RawScenario;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Value {
    /// Fixed textual form used in CSV cells.
    pub fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => format_float(*x),
            Value::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => (*i).into(),
            // Same digits as the CSV cell; non-finite values stay strings.
            Value::Float(x) => {
                let s = format_float(*x);
                s.parse::<f64>()
                    .ok()
                    .and_then(serde_json::Number::from_f64)
                    .map_or(serde_json::Value::String(s), serde_json::Value::Number)
            }
            Value::Text(s) => serde_json::Value::String(s.clone()),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            Value::Text(_) => None,
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::Int(i as i64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Text(b.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.10e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
        }
    }
}

/// Resolved scenario plus the computed tables.
#[derive(Debug, Clone)]
pub struct Report {
    pub scenario: RawScenario,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

fn comment_block<T: Serialize>(scenario: &T) -> CliResult<String> {
    let text = toml::to_string(scenario).map_err(|e| crate::error::CliError::Check(e.to_string()))?;
    let mut out = String::from("# resolved scenario (lengths and wavelengths in um, delays in fs)\n");
    for line in text.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {line}");
        }
    }
    Ok(out)
}

/// Serializes one table with the scenario echo.
pub fn render_table(scenario: &RawScenario, table: &Table, format: Format) -> CliResult<Vec<u8>> {
    let header = comment_block(scenario)?;
    match format {
        Format::Csv => {
            let mut buf = header.into_bytes();
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(&table.columns).map_err(csv_error)?;
                for row in &table.rows {
                    w.write_record(row.iter().map(Value::render)).map_err(csv_error)?;
                }
                w.flush()?;
            }
            Ok(buf)
        }
        Format::JsonLines => {
            let mut out = String::new();
            let meta = serde_json::json!({
                "table": table.name,
                "columns": table.columns,
                "scenario": scenario,
                "comment": header,
            });
            let _ = writeln!(out, "{meta}");
            for row in &table.rows {
                out.push('{');
                for (i, (c, v)) in table.columns.iter().zip(row).enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{}:{}", serde_json::Value::String(c.clone()), v.json());
                }
                out.push_str("}\n");
            }
            Ok(out.into_bytes())
        }
    }
}

fn csv_error(e: csv::Error) -> crate::error::CliError {
    crate::error::CliError::Io(std::io::Error::other(e.to_string()))
}

pub fn file_name(scenario: &str, table: &str, format: Format) -> String {
    format!("{scenario}-{table}.{}", format.extension())
}

/// Renders every table, then writes them all; nothing is written if
/// rendering fails.
pub fn write_report(report: &Report, out_dir: &Path, format: Format) -> CliResult<Vec<PathBuf>> {
    let rendered = report
        .tables
        .iter()
        .map(|t| Ok((file_name(&report.scenario.name, &t.name, format), render_table(&report.scenario, t, format)?)))
        .collect::<CliResult<Vec<_>>>()?;
    std::fs::create_dir_all(out_dir)?;
    let mut paths = Vec::with_capacity(rendered.len());
    for (name, bytes) in rendered {
        let path = out_dir.join(name);
        std::fs::write(&path, bytes)?;
        paths.push(path);
    }
    Ok(paths)
}
