//! CSV and JSON emission. Every number goes through [`round15`] first, so
//! both formats carry identical values.

use serde_json::{json, Map, Value as Json};
use toml::Value;

use crate::config::{ExperimentConfig, Format};

#[derive(Debug, Clone, PartialEq)]
pub enum Diag {
    Num(f64),
    Int(u64),
    Flag(bool),
    Text(String),
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub diagnostics: Vec<(String, Diag)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn diag(&mut self, key: impl Into<String>, value: Diag) {
        self.diagnostics.push((key.into(), value));
    }
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn number(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{:?}", round15(x))
    }
}

fn toml_text(v: &Value) -> String {
    match v {
        Value::Float(f) => format!("{f:?}"),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(toml_text).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn toml_json(v: &Value) -> Json {
    match v {
        Value::Float(f) => json!(f),
        Value::Integer(i) => json!(i),
        Value::Boolean(b) => json!(b),
        Value::String(s) => json!(s),
        Value::Array(items) => Json::Array(items.iter().map(toml_json).collect()),
        other => json!(other.to_string()),
    }
}

fn json_number(x: f64) -> Json {
    let x = round15(x);
    if x.is_finite() {
        json!(x)
    } else {
        Json::Null
    }
}

fn diag_text(d: &Diag) -> String {
    match d {
        Diag::Num(x) if x.is_nan() => "nan".into(),
        Diag::Num(x) => number(*x),
        Diag::Int(i) => i.to_string(),
        Diag::Flag(b) => b.to_string(),
        Diag::Text(s) => s.clone(),
    }
}

fn diag_json(d: &Diag) -> Json {
    match d {
        Diag::Num(x) => json_number(*x),
        Diag::Int(i) => json!(i),
        Diag::Flag(b) => json!(b),
        Diag::Text(s) => json!(s),
    }
}

pub fn render(cfg: &ExperimentConfig, table: &Table) -> String {
    match cfg.format {
        Format::Csv => render_csv(cfg, table),
        Format::Json => render_json(cfg, table),
    }
}

fn render_csv(cfg: &ExperimentConfig, table: &Table) -> String {
    let mut out = format!("# molrss {}\n", env!("CARGO_PKG_VERSION"));
    for (key, value) in cfg.to_pairs() {
        out.push_str(&format!("# {key} = {}\n", toml_text(&value)));
    }
    for (key, value) in &table.diagnostics {
        out.push_str(&format!("#! {key} = {}\n", diag_text(value)));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn render_json(cfg: &ExperimentConfig, table: &Table) -> String {
    let config: Map<String, Json> = cfg
        .to_pairs()
        .into_iter()
        .map(|(k, v)| (k.to_string(), toml_json(&v)))
        .collect();
    let diagnostics: Map<String, Json> = table
        .diagnostics
        .iter()
        .map(|(k, v)| (k.clone(), diag_json(v)))
        .collect();
    let rows: Vec<Json> = table
        .rows
        .iter()
        .map(|row| Json::Array(row.iter().map(|&x| json_number(x)).collect()))
        .collect();
    let doc = json!({
        "config": config,
        "columns": table.columns,
        "rows": rows,
        "diagnostics": diagnostics,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON values are always serializable");
    text.push('\n');
    text
}
