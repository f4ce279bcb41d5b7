use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to repeat a run: the command, its fully resolved
/// arguments, and digests of every input it read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    /// Absolute input path to lowercase hex SHA-256.
    pub inputs: BTreeMap<PathBuf, String>,
    pub seeds: Vec<u64>,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
}

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::json(path, e))
    }

    /// Recomputes every input digest and fails on the first mismatch.
    pub fn verify_inputs(&self) -> Result<()> {
        for (path, expected) in &self.inputs {
            let actual = sha256_file(path)?;
            if &actual != expected {
                return Err(CliError::invalid(format!(
                    "input {} changed since the run (sha256 {actual}, recorded {expected})",
                    path.display()
                )));
            }
        }
        Ok(())
    }
}

/// Builder that records inputs as a command reads them.
pub struct Recorder {
    command: &'static str,
    started_at: String,
    inputs: BTreeMap<PathBuf, String>,
}

impl Recorder {
    pub fn new(command: &'static str) -> Self {
        Recorder {
            command,
            started_at: now(),
            inputs: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_file(path)?;
        self.inputs.insert(path.to_path_buf(), digest);
        Ok(())
    }

    pub fn finish<A: Serialize>(
        self,
        args: &A,
        config: Option<serde_json::Value>,
        seeds: Vec<u64>,
    ) -> RunManifest {
        RunManifest {
            command: self.command.to_string(),
            args: serde_json::to_value(args).expect("arguments serialize"),
            config,
            inputs: self.inputs,
            seeds,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: self.started_at,
            finished_at: now(),
        }
    }
}
