use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

pub const TOOL: &str = "hamming-shift";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Metadata wrapper around every JSON document the tool writes.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a C,
    pub seed: Option<u64>,
    pub result: R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: &'static str, config: &'a C, seed: Option<u64>, result: R) -> Self {
        Envelope {
            tool: TOOL,
            version: VERSION,
            command,
            config,
            seed,
            result,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// A `#` comment line carrying tool, version and configuration, for CSV files.
pub fn csv_preamble<C: Serialize>(command: &str, config: &C, seed: Option<u64>) -> Result<String> {
    let meta = serde_json::json!({ "config": config, "seed": seed });
    Ok(format!("# {TOOL} {VERSION} {command} {meta}\n"))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn print(contents: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(contents.as_bytes())?;
    out.flush()?;
    Ok(())
}
