use std::path::PathBuf;

use clap::Args;
use samkit::{dbi_curve, ward_linkage, KGrid};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{absolute, csv_bytes, load_matrix, load_pair, stem, subsample_rows, GridArg};
use crate::error::Result;
use crate::manifest::{Recorder, MANIFEST_FILE};
use crate::output::Artifacts;
use crate::svg::{line_plot, Plot};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DbiArgs {
    #[arg(long)]
    pub vectors: PathBuf,
    /// Optional labels, only used to check row ids and name the dataset.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Smallest partition size on the grid [default: 2].
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Largest partition size on the grid [default: number of rows].
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = GridArg::Auto)]
    pub grid: GridArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: bool,
    #[arg(long)]
    pub subsample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub representation: Option<String>,
    #[arg(long)]
    pub dataset: Option<String>,
}

pub fn run(mut args: DbiArgs) -> Result<String> {
    args.vectors = absolute(&args.vectors)?;
    args.labels = args.labels.as_deref().map(absolute).transpose()?;
    args.out = absolute(&args.out)?;
    args.representation.get_or_insert_with(|| stem(&args.vectors));
    if args.dataset.is_none() {
        args.dataset = args.labels.as_deref().map(stem);
    }
    execute(&args)
}

pub fn execute(args: &DbiArgs) -> Result<String> {
    let mut rec = Recorder::new("dbi");
    let mut matrix = match &args.labels {
        Some(labels) => load_pair(&mut rec, &args.vectors, labels)?.1,
        None => load_matrix(&mut rec, &args.vectors)?,
    };
    if let Some(rows) = subsample_rows(matrix.rows(), args.subsample, args.seed) {
        matrix = matrix.select_rows(&rows);
    }
    let n = matrix.rows();
    let grid = KGrid::from_spec(args.grid.into(), args.k_min.unwrap_or(2), args.k_max.unwrap_or(n))?;
    let dendrogram = ward_linkage(&matrix)?;
    let curve = dbi_curve(&matrix, &dendrogram, &grid)?;

    let mut out = Artifacts::new();
    out.add(args.out.join("dbi_curve.csv"), csv_bytes(|w| curve.write_csv(w)));
    if args.svg {
        let pts: Vec<(f64, f64)> = curve.points.iter().map(|&(k, v)| (k as f64, v)).collect();
        let plot = Plot {
            title: &format!("Davies-Bouldin index, area = {:.4}", curve.area),
            x_label: "number of clusters k",
            y_label: "DBI (lower is better, axis inverted)",
            invert_y: true,
        };
        out.add(args.out.join("dbi_curve.svg"), line_plot(&plot, &pts).into_bytes());
    }
    out.add_json(
        args.out.join("summary.json"),
        &json!({
            "kind": "dbi",
            "dbi_area": curve.area,
            "skipped": curve.skipped,
            "k_min": grid.first(),
            "k_max": grid.last(),
            "n": n,
            "dataset": args.dataset,
            "representation": args.representation,
        }),
    );
    let seeds = if args.subsample.is_some() { vec![args.seed] } else { vec![] };
    out.add_json(args.out.join(MANIFEST_FILE), &rec.finish(args, None, seeds));
    out.commit()?;
    Ok(format!("{:?}", curve.area))
}
