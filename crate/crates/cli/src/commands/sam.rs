use std::path::PathBuf;

use clap::{Args, ValueEnum};
use samkit::{alignment_curve, ward_linkage, AlignmentMode, KGrid};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{absolute, csv_bytes, load_pair, stem, subsample_rows, GridArg};
use crate::error::{CliError, Result};
use crate::manifest::{Recorder, MANIFEST_FILE};
use crate::output::Artifacts;
use crate::svg::{line_plot, Plot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Balanced,
    Target,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SamArgs {
    /// Vector file (binary SAMV or CSV with an id column).
    #[arg(long)]
    pub vectors: PathBuf,
    /// Labels: dataset JSONL/TSV or an `id<TAB>label` sidecar.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Balanced)]
    pub mode: ModeArg,
    /// Positive class for `--mode target`.
    #[arg(long)]
    pub target: Option<String>,
    /// Smallest partition size on the grid [default: 1].
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Largest partition size on the grid [default: number of rows].
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = GridArg::Auto)]
    pub grid: GridArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Also render the curve as SVG.
    #[arg(long)]
    pub svg: bool,
    /// Cluster a uniform random subset of this many rows.
    #[arg(long)]
    pub subsample: Option<usize>,
    /// Seed for `--subsample`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Name recorded in the summary [default: vectors file stem].
    #[arg(long)]
    pub representation: Option<String>,
    /// Name recorded in the summary [default: labels file stem].
    #[arg(long)]
    pub dataset: Option<String>,
    /// Write the merge list as dendrogram.csv.
    #[arg(long)]
    pub save_dendrogram: bool,
}

pub fn run(mut args: SamArgs) -> Result<String> {
    args.vectors = absolute(&args.vectors)?;
    args.labels = absolute(&args.labels)?;
    args.out = absolute(&args.out)?;
    args.representation.get_or_insert_with(|| stem(&args.vectors));
    args.dataset.get_or_insert_with(|| stem(&args.labels));
    execute(&args)
}

fn mode(args: &SamArgs) -> Result<AlignmentMode> {
    match (args.mode, &args.target) {
        (ModeArg::Balanced, None) => Ok(AlignmentMode::Balanced),
        (ModeArg::Target, Some(t)) => Ok(AlignmentMode::Target(t.clone())),
        (ModeArg::Balanced, Some(_)) => Err(CliError::invalid("--target only applies to --mode target")),
        (ModeArg::Target, None) => Err(CliError::invalid("--mode target needs --target LABEL")),
    }
}

pub fn execute(args: &SamArgs) -> Result<String> {
    let mode = mode(args)?;
    let mut rec = Recorder::new("sam");
    let (mut dataset, mut matrix) = load_pair(&mut rec, &args.vectors, &args.labels)?;
    if let Some(rows) = subsample_rows(dataset.len(), args.subsample, args.seed) {
        dataset = dataset.subset(&rows)?;
        matrix = matrix.select_rows(&rows);
    }
    let n = dataset.len();
    let grid = KGrid::from_spec(args.grid.into(), args.k_min.unwrap_or(1), args.k_max.unwrap_or(n))?;

    let dendrogram = ward_linkage(&matrix)?;
    let curve = alignment_curve(&dendrogram, &dataset, &grid, &mode)?;

    let mut out = Artifacts::new();
    out.add(args.out.join("alignment_curve.csv"), csv_bytes(|w| curve.write_csv(w)));
    if args.save_dendrogram {
        out.add(args.out.join("dendrogram.csv"), csv_bytes(|w| dendrogram.write_csv(w)));
    }
    if args.svg {
        let pts: Vec<(f64, f64)> = curve.points().iter().map(|p| (p.k as f64, p.a)).collect();
        let plot = Plot {
            title: &format!("Alignment curve, SAM = {:.4}", curve.sam()),
            x_label: "number of clusters k",
            y_label: "alignment score a(k)",
            invert_y: false,
        };
        out.add(args.out.join("alignment_curve.svg"), line_plot(&plot, &pts).into_bytes());
    }
    out.add_json(
        args.out.join("summary.json"),
        &json!({
            "kind": "sam",
            "sam": curve.sam(),
            "mode": mode.name(),
            "target": mode.target(),
            "k_min": curve.k_min(),
            "k_max": curve.k_max(),
            "grid_points": curve.points().len(),
            "n": n,
            "dataset": args.dataset,
            "representation": args.representation,
        }),
    );
    let seeds = if args.subsample.is_some() { vec![args.seed] } else { vec![] };
    out.add_json(args.out.join(MANIFEST_FILE), &rec.finish(args, None, seeds));
    out.commit()?;
    Ok(format!("{:?}", curve.sam()))
}
