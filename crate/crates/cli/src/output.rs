//! Collects a command's artifacts in memory and publishes them together, so
//! a failed run leaves nothing behind and readers never see a half-written
//! file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Default)]
pub struct Artifacts {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifacts {
    pub fn new() -> Self {
        Artifacts::default()
    }

    pub fn add(&mut self, path: impl Into<PathBuf>, bytes: Vec<u8>) {
        self.files.push((path.into(), bytes));
    }

    pub fn add_json<T: serde::Serialize>(&mut self, path: impl Into<PathBuf>, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("artifact values serialize");
        bytes.push(b'\n');
        self.add(path, bytes);
    }

    /// Writes every file next to its destination under a temporary name,
    /// then renames them all into place. Any failure removes what was
    /// staged.
    pub fn commit(self) -> Result<()> {
        let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(self.files.len());
        let result = (|| -> Result<()> {
            for (path, bytes) in &self.files {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                }
                let tmp = temp_name(path);
                let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
                staged.push((tmp.clone(), path.clone()));
                f.write_all(bytes)
                    .and_then(|_| f.sync_all())
                    .map_err(|e| CliError::io(&tmp, e))?;
            }
            for (tmp, path) in &staged {
                fs::rename(tmp, path).map_err(|e| CliError::io(path, e))?;
            }
            Ok(())
        })();
        if result.is_err() {
            for (tmp, _) in &staged {
                let _ = fs::remove_file(tmp);
            }
        }
        result
    }
}

fn temp_name(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
    path.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}
