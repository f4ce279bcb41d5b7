use std::path::{Path, PathBuf};

use clap::Args;
use samkit::harness::{learning_curve, ExperimentConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{absolute, csv_bytes, load_pair, stem};
use crate::error::{CliError, Result};
use crate::manifest::{Recorder, MANIFEST_FILE};
use crate::output::Artifacts;
use crate::svg::{line_plot, Plot};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LcArgs {
    /// Experiment JSON. Relative paths inside it resolve against its folder.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: bool,
}

pub fn run(mut args: LcArgs) -> Result<String> {
    args.config = absolute(&args.config)?;
    args.out = absolute(&args.out)?;
    execute(&args)
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let mut config: ExperimentConfig =
        serde_json::from_slice(&bytes).map_err(|e| CliError::json(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    for p in [&mut config.vectors, &mut config.labels, &mut config.test_ids]
        .into_iter()
        .flatten()
    {
        *p = base.join(&*p);
    }
    Ok(config)
}

pub fn execute(args: &LcArgs) -> Result<String> {
    let mut rec = Recorder::new("lc");
    rec.input(&args.config)?;
    let mut config = read_config(&args.config)?;
    let vectors = config
        .vectors
        .clone()
        .ok_or_else(|| CliError::invalid("config has no `vectors` path"))?;
    let labels = config
        .labels
        .clone()
        .ok_or_else(|| CliError::invalid("config has no `labels` path"))?;
    let (dataset, matrix) = load_pair(&mut rec, &vectors, &labels)?;
    if let Some(ids) = &config.test_ids {
        rec.input(ids)?;
    }
    if config.representation.is_empty() {
        config.representation = stem(&vectors);
    }
    let dataset_name = config.dataset.clone().unwrap_or_else(|| stem(&labels));

    let run = learning_curve(&config, &dataset, &matrix)?;

    let mut out = Artifacts::new();
    let mut cells = Vec::new();
    for c in &run.cells {
        serde_json::to_writer(&mut cells, c).expect("cell records serialize");
        cells.push(b'\n');
    }
    out.add(args.out.join("cells.jsonl"), cells);
    out.add(args.out.join("learning_curve.csv"), csv_bytes(|w| run.curve.write_csv(w)));
    if args.svg {
        let pts: Vec<(f64, f64)> = run.curve.points.iter().map(|p| (p.budget as f64, p.mean)).collect();
        let plot = Plot {
            title: &format!("Learning curve, ALC = {:.4}", run.curve.alc),
            x_label: "labeled training samples N",
            y_label: &format!("test {}", config.metric.name()),
            invert_y: false,
        };
        out.add(args.out.join("learning_curve.svg"), line_plot(&plot, &pts).into_bytes());
    }
    out.add_json(
        args.out.join("summary.json"),
        &json!({
            "kind": "lc",
            "alc": run.curve.alc,
            "metric": config.metric.name(),
            "target": config.target,
            "budgets": config.budgets,
            "dataset": dataset_name,
            "representation": config.representation,
        }),
    );
    let resolved = serde_json::to_value(&config).expect("config serializes");
    let seeds = config.seeds.clone();
    out.add_json(args.out.join(MANIFEST_FILE), &rec.finish(args, Some(resolved), seeds));
    out.commit()?;
    Ok(format!("{:?}", run.curve.alc))
}
