use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use hardy_core::Coef;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const TOOL: &str = "hardy";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a subcommand produced.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub body: Value,
    /// Rows for CSV output, when the command has a tabular form.
    pub table: Option<Table>,
    /// Remarks copied into the metadata.
    pub notes: Vec<String>,
    /// Human-readable lines for the terminal.
    pub summary: String,
    pub inconclusive: bool,
}

impl Artifact {
    pub fn new(body: Value, summary: String) -> Self {
        Artifact { body, table: None, notes: Vec::new(), summary, inconclusive: false }
    }
}

/// Shortest round-trip decimal, as JSON writes it; `nan` and `inf` spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        serde_json::Number::from_f64(x).expect("finite").to_string()
    }
}

/// Fixed six-decimal display for terminal tables.
pub fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

/// Exact parts as rational strings, floating parts as numbers.
pub fn coef_json(c: &Coef) -> Value {
    match c.as_exact() {
        Some(z) => json!({ "re": z.re.to_string(), "im": z.im.to_string() }),
        None => {
            let z = c.to_c64();
            json!({ "re": z.re, "im": z.im })
        }
    }
}

fn meta(config: &RunConfig, notes: &[String]) -> Value {
    let mut m = json!({
        "tool": TOOL,
        "version": VERSION,
        "config_hash": config.hash(),
        "seed": config.seed,
        "config": config,
    });
    if !notes.is_empty() {
        m["notes"] = json!(notes);
    }
    m
}

pub fn render(config: &RunConfig, artifact: &Artifact, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let doc = json!({ "meta": meta(config, &artifact.notes), "result": artifact.body });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Csv => {
            let table = artifact
                .table
                .as_ref()
                .with_context(|| format!("{} has no CSV form; use --format json", config.command))?;
            let mut out = Vec::new();
            writeln!(out, "# tool: {TOOL} {VERSION}")?;
            writeln!(out, "# config_hash: {}", config.hash())?;
            writeln!(out, "# seed: {}", config.seed)?;
            writeln!(out, "# config: {}", config.canonical_json())?;
            for n in &artifact.notes {
                writeln!(out, "# note: {n}")?;
            }
            {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(&table.header)?;
                for row in &table.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
            Ok(String::from_utf8(out)?)
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
