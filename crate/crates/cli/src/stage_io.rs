//! JSON-lines staging files between pipeline steps.
//!
//! Every output starts with one metadata object
//! (`{"_meta":{"tool":...,"version":...,"config":...,"seed":...}}`)
//! recording the tool version, semantic config hash, and global seed;
//! readers skip it. CSV outputs carry the same information as a leading
//! `#` comment.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use orthoprobe::error::{Error, Result};

use crate::config::RunConfig;

#[derive(Debug, Serialize, Deserialize)]
struct MetaLine {
    _meta: Meta,
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    tool: String,
    version: String,
    config: String,
    seed: u64,
}

pub fn meta_json(config: &RunConfig) -> String {
    serde_json::to_string(&MetaLine {
        _meta: Meta {
            tool: "orthoprobe".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.hash(),
            seed: config.seed,
        },
    })
    .expect("meta serializes")
}

pub fn meta_comment(config: &RunConfig) -> String {
    format!(
        "orthoprobe {} config={} seed={}",
        env!("CARGO_PKG_VERSION"),
        config.hash(),
        config.seed
    )
}

/// Writes the metadata line plus one JSON object per record.
pub fn write_jsonl<T: Serialize>(
    path: &Path,
    config: &RunConfig,
    records: impl IntoIterator<Item = T>,
) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(out, "{}", meta_json(config)).map_err(io_err)?;
    for record in records {
        let line = serde_json::to_string(&record)
            .map_err(|e| Error::Format {
                file: path.display().to_string(),
                line: 0,
                message: e.to_string(),
            })?;
        writeln!(out, "{line}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Reads every record line, skipping metadata. Parse failures name the line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with("{\"_meta\"") {
            continue;
        }
        let record: T = serde_json::from_str(line)
            .map_err(|e| Error::format(&name, i + 1, e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

/// Writes a text file (CSV, SVG, JSON summaries) creating parents as needed.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
