use std::path::Path;

use resolab_core::report::ConvergenceReport;
use serde_json::{json, Map, Value};

use crate::args::Format;

/// Result of one subcommand before it is written anywhere.
pub struct Output {
    /// File stem, e.g. `disk-hardy`.
    pub name: String,
    /// Printed on stdout and stored under `result`.
    pub payload: Value,
    pub report: Option<ConvergenceReport>,
    /// Extra plot-ready files `(file name, contents)`.
    pub plots: Vec<(String, String)>,
    /// Command-specific metadata (grid parameters and the like).
    pub meta: Map<String, Value>,
}

impl Output {
    pub fn new(name: &str, payload: Value) -> Self {
        Self { name: name.into(), payload, report: None, plots: Vec::new(), meta: Map::new() }
    }

    pub fn with_report(mut self, report: ConvergenceReport) -> Self {
        self.report = Some(report);
        self
    }

    pub fn with_plot(mut self, name: String, contents: String) -> Self {
        self.plots.push((name, contents));
        self
    }

    pub fn meta(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.into(), value);
        self
    }
}

/// Writes `<name>.json`, `<name>.csv` and plot files into `dir`.
pub fn write(dir: &Path, format: Format, out: &mut Output, common: &Map<String, Value>) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut metadata = common.clone();
    metadata.extend(out.meta.clone());
    if let Some(report) = out.report.as_mut() {
        for (k, v) in &metadata {
            report.metadata.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }
    if matches!(format, Format::Json | Format::Both) {
        let mut doc = json!({ "metadata": metadata, "result": out.payload });
        if let Some(report) = &out.report {
            doc["report"] = serde_json::to_value(report).expect("report serializes");
        }
        let text = serde_json::to_string_pretty(&doc).expect("json serializes") + "\n";
        std::fs::write(dir.join(format!("{}.json", out.name)), text)?;
    }
    if matches!(format, Format::Csv | Format::Both) {
        if let Some(report) = &out.report {
            std::fs::write(dir.join(format!("{}.csv", out.name)), report.to_csv())?;
        }
    }
    for (name, contents) in &out.plots {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}
