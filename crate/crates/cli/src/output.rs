//! CSV and JSON writers.
//!
//! CSV layout:
//!
//! ```text
//! #! phononet <version>
//! # <resolved configuration as TOML, one line per line>
//! ## <summary key> = <value>
//! <header row>
//! <data rows>
//! ```
//!
//! Stripping the leading `# ` from the single-hash lines gives a config that
//! reproduces the run. Numbers are written with 17 significant digits.

use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tabular result with scalar summary entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: Vec<(String, Value)>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.push((key.to_string(), value.into()));
    }
}

/// `x` with 17 significant digits; non-finite values as `nan`, `inf`, `-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn render(config: &RunConfig, report: &Report, format: Format) -> String {
    match format {
        Format::Csv => render_csv(config, report),
        Format::Json => render_json(config, report),
    }
}

fn render_csv(config: &RunConfig, report: &Report) -> String {
    let mut out = format!("#! phononet {VERSION}\n");
    for line in config.to_toml().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    for (key, value) in &report.summary {
        out.push_str(&format!("## {key} = {value}\n"));
    }
    out.push_str(&report.columns.join(","));
    out.push('\n');
    for row in &report.rows {
        let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(format_number(x)))
}

fn render_json(config: &RunConfig, report: &Report) -> String {
    let mut root = Map::new();
    root.insert("version".into(), Value::String(VERSION.into()));
    root.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
    root.insert("config_toml".into(), Value::String(config.to_toml()));
    root.insert("summary".into(), Value::Object(report.summary.iter().cloned().collect()));
    root.insert("columns".into(), Value::Array(report.columns.iter().cloned().map(Value::String).collect()));
    let rows = report.rows.iter().map(|r| Value::Array(r.iter().map(|&x| json_number(x)).collect())).collect();
    root.insert("rows".into(), Value::Array(rows));
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes");
    s.push('\n');
    s
}

/// Recovers the configuration text from a CSV header.
pub fn header_config(csv: &str) -> String {
    let mut text = String::new();
    for line in csv.lines() {
        if line.starts_with("#!") || line.starts_with("##") {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# ") {
            text.push_str(rest);
            text.push('\n');
        } else if line == "#" {
            text.push('\n');
        } else if !line.starts_with('#') {
            break;
        }
    }
    text
}
