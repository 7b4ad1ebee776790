//! Table and manifest serialization.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::config::Format;

/// Named columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Comment lines printed above the CSV header.
    pub preamble: Vec<String>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn new(preamble: Vec<String>) -> Self {
        Table {
            preamble,
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        if let Some((_, first)) = self.columns.first() {
            assert_eq!(first.len(), values.len(), "ragged table column");
        }
        self.columns.push((name.into(), values));
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, c)| c.len())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// CSV with 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for line in &self.preamble {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
        let header: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        s.push_str(&header.join(","));
        s.push('\n');
        for r in 0..self.rows() {
            let row: Vec<String> = self.columns.iter().map(|(_, c)| format!("{:.16e}", c[r])).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    fn to_json_value(&self) -> Value {
        Value::Array(
            self.columns
                .iter()
                .map(|(name, values)| json!({ "name": name, "values": values }))
                .collect(),
        )
    }
}

/// Ordered `key=value` run record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn extend(&mut self, pairs: Vec<(String, String)>) {
        self.entries.extend(pairs);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

pub fn render(table: &Table, manifest: &Manifest, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut m = Map::new();
            for (k, v) in &manifest.entries {
                m.insert(k.clone(), Value::String(v.clone()));
            }
            let doc = json!({
                "preamble": table.preamble,
                "manifest": Value::Object(m),
                "columns": table.to_json_value(),
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("JSON of plain values");
            s.push('\n');
            s
        }
    }
}

/// Sidecar path holding the manifest of an output file.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

/// Writes the table to `output` (or stdout) and the manifest next to it
/// (or to stderr).
pub fn emit(table: &Table, manifest: &Manifest, format: Format, output: Option<&Path>) -> io::Result<()> {
    let body = render(table, manifest, format);
    match output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, body)?;
            fs::write(manifest_path(path), manifest.to_text())
        }
        None => {
            io::stdout().lock().write_all(body.as_bytes())?;
            io::stderr().lock().write_all(manifest.to_text().as_bytes())
        }
    }
}
