//! Record of one command-line run, written next to its outputs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub base_seed: u64,
    pub version: String,
    /// Every file the run wrote, this manifest included.
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(command_line: Vec<String>, config: serde_json::Value, base_seed: u64) -> Self {
        Self {
            command_line,
            config,
            base_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    /// Writes the manifest to `path`, adding that path to the output list.
    pub fn finish(mut self, path: &Path, started: Instant) -> Result<Self> {
        self.outputs.push(path.to_path_buf());
        self.wall_clock_seconds = started.elapsed().as_secs_f64();
        let mut text = serde_json::to_string_pretty(&self)
            .map_err(|e| Error::Config(format!("cannot serialize manifest: {e}")))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
        Ok(self)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        })
    }
}

/// `curve.csv` -> `curve.manifest.json`.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}
