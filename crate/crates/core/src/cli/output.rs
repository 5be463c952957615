//! Tabular artifacts: CSV with a `#` metadata header, or JSON.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::config::Format;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Ordered `key: value` pairs written ahead of the data.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn add(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }
}

fn csv_body(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn csv_header(meta: &Metadata) -> String {
    let mut out = String::new();
    for (k, v) in &meta.entries {
        if v.contains('\n') {
            out.push_str(&format!("# {k}:\n"));
            for l in v.lines() {
                if l.is_empty() {
                    out.push_str("#\n");
                } else {
                    out.push_str(&format!("#   {l}\n"));
                }
            }
        } else {
            out.push_str(&format!("# {k}: {v}\n"));
        }
    }
    out
}

fn json_document(table: &Table, meta: &Metadata) -> serde_json::Value {
    let metadata: serde_json::Map<String, serde_json::Value> = meta
        .entries
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
        .collect();
    serde_json::json!({
        "metadata": metadata,
        "columns": table.columns,
        "rows": table.rows,
    })
}

/// Writes `dir/stem.{csv,json}` and returns its path.
pub fn write_table(
    dir: &Path,
    stem: &str,
    format: Format,
    table: &Table,
    meta: &Metadata,
) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (path, text) = match format {
        Format::Csv => (
            dir.join(format!("{stem}.csv")),
            format!("{}{}", csv_header(meta), csv_body(table)),
        ),
        Format::Json => (
            dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&json_document(table, meta))? + "\n",
        ),
    };
    let mut f = fs::File::create(&path)?;
    f.write_all(text.as_bytes())?;
    Ok(path)
}

/// Writes a standalone JSON record.
pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(path)
}
