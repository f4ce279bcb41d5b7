pub mod bow;
pub mod correlate;
pub mod dbi;
pub mod lc;
pub mod rerun;
pub mod sam;

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use log::info;
use samkit::data::{load_dataset, load_vectors_with_ids, sample_indices, DatasetFormat};
use samkit::{EmbeddingMatrix, GridSpec, LabeledDataset};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::manifest::Recorder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridArg {
    Full,
    Auto,
}

impl From<GridArg> for GridSpec {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::Full => GridSpec::Full,
            GridArg::Auto => GridSpec::Auto,
        }
    }
}

pub fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).map_err(|e| CliError::io(path, e))
}

/// File stem, used as a default name for datasets and representations.
pub fn stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_string()
}

/// Reads the labels, then the vectors, checking that rows line up.
pub fn load_pair(
    rec: &mut Recorder,
    vectors: &Path,
    labels: &Path,
) -> Result<(LabeledDataset, EmbeddingMatrix)> {
    rec.input(labels)?;
    let dataset = load_dataset(labels, DatasetFormat::from_path(labels))?;
    rec.input(vectors)?;
    let (matrix, ids) = load_vectors_with_ids(vectors)?;
    check_rows(&dataset, &matrix, ids.as_deref(), vectors)?;
    Ok((dataset, matrix))
}

pub fn load_matrix(rec: &mut Recorder, vectors: &Path) -> Result<EmbeddingMatrix> {
    rec.input(vectors)?;
    let (matrix, _) = load_vectors_with_ids(vectors)?;
    Ok(matrix)
}

fn check_rows(
    dataset: &LabeledDataset,
    matrix: &EmbeddingMatrix,
    ids: Option<&[String]>,
    vectors: &Path,
) -> Result<()> {
    if matrix.rows() != dataset.len() {
        return Err(samkit::Error::Dimension(format!(
            "{} has {} rows but the labels list {} samples",
            vectors.display(),
            matrix.rows(),
            dataset.len()
        ))
        .into());
    }
    if let Some(ids) = ids {
        if let Some(i) = (0..ids.len()).find(|&i| ids[i] != dataset.ids()[i]) {
            return Err(CliError::invalid(format!(
                "row {i}: vector id `{}` does not match label id `{}`",
                ids[i],
                dataset.ids()[i]
            )));
        }
    }
    Ok(())
}

/// Uniform row subsample shared by `sam` and `dbi`, so equal seeds pick
/// equal rows.
pub fn subsample_rows(n: usize, size: Option<usize>, seed: u64) -> Option<Vec<usize>> {
    match size {
        Some(m) if m < n => {
            info!("subsampling {m} of {n} rows with seed {seed}");
            Some(sample_indices(n, m, seed))
        }
        _ => None,
    }
}

pub fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory cannot fail");
    buf
}
