use std::path::{Path, PathBuf};

use clap::Args;
use samkit::data::{
    build_bow, load_dataset, write_labels_tsv, write_vectors, write_vectors_csv, DatasetFormat,
};
use serde::{Deserialize, Serialize};

use super::{absolute, csv_bytes};
use crate::error::Result;
use crate::manifest::Recorder;
use crate::output::Artifacts;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BowArgs {
    /// Dataset with texts (JSONL, or TSV with a text column).
    #[arg(long)]
    pub input: PathBuf,
    /// Output vectors; a `.csv` extension selects the CSV layout. Label,
    /// vocabulary and manifest files are written alongside.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(mut args: BowArgs) -> Result<String> {
    args.input = absolute(&args.input)?;
    args.out = absolute(&args.out)?;
    execute(&args)
}

pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

pub fn execute(args: &BowArgs) -> Result<String> {
    let mut rec = Recorder::new("bow");
    rec.input(&args.input)?;
    let dataset = load_dataset(&args.input, DatasetFormat::from_path(&args.input))?;
    let (matrix, vocab) = build_bow(&dataset)?;

    let is_csv = args.out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let vectors = if is_csv {
        csv_bytes(|w| write_vectors_csv(w, dataset.ids(), &matrix))
    } else {
        csv_bytes(|w| write_vectors(w, &matrix))
    };
    let mut out = Artifacts::new();
    out.add(&args.out, vectors);
    out.add(sidecar(&args.out, "labels.tsv"), csv_bytes(|w| write_labels_tsv(w, &dataset)));
    out.add(sidecar(&args.out, "vocab.txt"), csv_bytes(|w| vocab.write(w)));
    out.add_json(sidecar(&args.out, "manifest.json"), &rec.finish(args, None, vec![]));
    out.commit()?;
    Ok(format!("{} documents x {} terms", matrix.rows(), matrix.dim()))
}
