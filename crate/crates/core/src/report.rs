//! Tabular study output with metadata, serializable to JSON, CSV and plain
//! whitespace-separated data files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Rows of numbers under named columns, plus free-form metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub title: String,
    pub metadata: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Fixed 17-significant-digit scientific notation.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl ConvergenceReport {
    pub fn new(title: impl Into<String>, columns: Vec<String>) -> Self {
        Self { title: title.into(), metadata: BTreeMap::new(), columns, rows: Vec::new() }
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metadata.insert(key.into(), value);
    }

    pub fn meta(&self, key: &str) -> Option<&Value> {
        self.metadata.get(key)
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::domain(format!(
                "row has {} entries, report has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// CSV with `#`-prefixed metadata lines, a header row and one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# title: {}", self.title);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Whitespace-separated columns `x y...` for plotting tools.
    pub fn to_dat(&self, x: &str, ys: &[&str]) -> Result<String> {
        let index = |name: &str| {
            self.columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::domain(format!("unknown column {name}")))
        };
        let mut cols = vec![index(x)?];
        for y in ys {
            cols.push(index(y)?);
        }
        let mut out = String::new();
        let names: Vec<&str> = cols.iter().map(|j| self.columns[*j].as_str()).collect();
        let _ = writeln!(out, "# {}", names.join(" "));
        for row in &self.rows {
            let line: Vec<String> = cols.iter().map(|j| format_number(row[*j])).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        Ok(out)
    }
}
