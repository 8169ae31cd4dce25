//! The `dc1lab/1` report envelope and atomic file output.

use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

pub const SCHEMA: &str = "dc1lab/1";

/// Key of the only block allowed to differ between identical runs.
pub const METADATA_KEY: &str = "metadata";

#[derive(Serialize)]
pub struct Envelope {
    pub schema: &'static str,
    pub command: String,
    pub seed: u64,
    /// The mathematical notion the result instantiates.
    pub notion: String,
    pub config: Value,
    pub result: Value,
    pub metadata: Value,
}

impl Envelope {
    pub fn new(command: &str, seed: u64, notion: &str, config: Value, result: Value, started: Instant) -> Self {
        let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Envelope {
            schema: SCHEMA,
            command: command.into(),
            seed,
            notion: notion.into(),
            config,
            result,
            metadata: json!({
                "tool_version": env!("CARGO_PKG_VERSION"),
                "finished_unix": unix,
                "elapsed_ms": started.elapsed().as_millis() as u64,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// The report with its metadata block removed, for determinism checks.
pub fn strip_metadata(report: &str) -> Result<Value, serde_json::Error> {
    let mut v: Value = serde_json::from_str(report)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove(METADATA_KEY);
    }
    Ok(v)
}
