use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use log::warn;
use samkit::harness::pearson;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::absolute;
use crate::error::{CliError, Result};
use crate::manifest::{Recorder, MANIFEST_FILE};
use crate::output::Artifacts;
use crate::svg::{scatter_plot, Plot};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CorrelateArgs {
    /// Glob over summary.json files written by sam, dbi and lc.
    #[arg(long)]
    pub summaries: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Files the glob matched, fixed at first run.
    #[arg(skip)]
    #[serde(default)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Deserialize)]
struct Summary {
    kind: String,
    #[serde(default)]
    dataset: Option<String>,
    #[serde(default)]
    representation: Option<String>,
    sam: Option<f64>,
    dbi_area: Option<f64>,
    alc: Option<f64>,
}

#[derive(Debug, Default)]
struct Row {
    sam: Option<f64>,
    dbi: Option<f64>,
    alc: Option<f64>,
}

pub fn run(mut args: CorrelateArgs) -> Result<String> {
    args.out = absolute(&args.out)?;
    let pattern = glob::glob(&args.summaries)
        .map_err(|e| CliError::invalid(format!("bad glob `{}`: {e}", args.summaries)))?;
    let mut files = Vec::new();
    for entry in pattern {
        let path = entry.map_err(|e| {
            let path = e.path().to_path_buf();
            CliError::io(path, e.into())
        })?;
        files.push(absolute(&path)?);
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::invalid(format!("no files match `{}`", args.summaries)));
    }
    args.files = files;
    execute(&args)
}

fn slot<'a>(row: &'a mut Row, kind: &str) -> Option<&'a mut Option<f64>> {
    match kind {
        "sam" => Some(&mut row.sam),
        "dbi" => Some(&mut row.dbi),
        "lc" => Some(&mut row.alc),
        _ => None,
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn execute(args: &CorrelateArgs) -> Result<String> {
    let mut rec = Recorder::new("correlate");
    let mut rows: BTreeMap<(String, String), Row> = BTreeMap::new();
    for path in &args.files {
        rec.input(path)?;
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let s: Summary = serde_json::from_slice(&bytes).map_err(|e| CliError::json(path, e))?;
        let value = match s.kind.as_str() {
            "sam" => s.sam,
            "dbi" => s.dbi_area,
            "lc" => s.alc,
            other => {
                warn!("{}: ignoring summary of kind `{other}`", path.display());
                continue;
            }
        };
        let value = value.ok_or_else(|| {
            CliError::invalid(format!("{}: `{}` summary lacks its value", path.display(), s.kind))
        })?;
        let key = (
            s.dataset.unwrap_or_default(),
            s.representation.unwrap_or_default(),
        );
        let entry = slot(rows.entry(key.clone()).or_default(), &s.kind).expect("kind checked above");
        if entry.replace(value).is_some() {
            return Err(CliError::invalid(format!(
                "two `{}` summaries for dataset `{}`, representation `{}`",
                s.kind, key.0, key.1
            )));
        }
    }

    let mut csv = b"dataset,representation,sam,dbi,alc\n".to_vec();
    let (mut sam_pts, mut dbi_pts) = (Vec::new(), Vec::new());
    for ((dataset, repr), row) in &rows {
        let Some(alc) = row.alc else { continue };
        if row.sam.is_none() && row.dbi.is_none() {
            continue;
        }
        writeln!(csv, "{dataset},{repr},{},{},{alc}", cell(row.sam), cell(row.dbi)).unwrap();
        let label = if dataset.is_empty() { repr.clone() } else { format!("{dataset}/{repr}") };
        if let Some(s) = row.sam {
            sam_pts.push((s, alc, label.clone()));
        }
        if let Some(d) = row.dbi {
            dbi_pts.push((d, alc, label));
        }
    }
    if sam_pts.len() < 3 {
        return Err(CliError::invalid(format!(
            "need at least 3 (SAM, ALC) pairs, found {}",
            sam_pts.len()
        )));
    }
    let xs: Vec<f64> = sam_pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = sam_pts.iter().map(|p| p.1).collect();
    let r_sam = pearson(&xs, &ys)?;
    let r_dbi = if dbi_pts.len() >= 3 {
        let xs: Vec<f64> = dbi_pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = dbi_pts.iter().map(|p| p.1).collect();
        Some(pearson(&xs, &ys)?)
    } else {
        if !dbi_pts.is_empty() {
            warn!("only {} (DBI, ALC) pairs; skipping that correlation", dbi_pts.len());
        }
        None
    };

    let mut out = Artifacts::new();
    out.add(args.out.join("scatter.csv"), csv);
    out.add_json(
        args.out.join("correlation.json"),
        &json!({
            "pearson_sam_alc": r_sam,
            "sam_pairs": sam_pts.len(),
            "pearson_dbi_alc": r_dbi,
            "dbi_pairs": dbi_pts.len(),
        }),
    );
    let title = format!("SAM vs ALC, r = {r_sam:.3}");
    let plot = Plot {
        title: &title,
        x_label: "SAM",
        y_label: "ALC",
        invert_y: false,
    };
    out.add(args.out.join("sam_alc.svg"), scatter_plot(&plot, &sam_pts).into_bytes());
    if let Some(r) = r_dbi {
        let title = format!("DBI area vs ALC, r = {r:.3}");
        let plot = Plot {
            title: &title,
            x_label: "DBI area",
            y_label: "ALC",
            invert_y: false,
        };
        out.add(args.out.join("dbi_alc.svg"), scatter_plot(&plot, &dbi_pts).into_bytes());
    }
    out.add_json(args.out.join(MANIFEST_FILE), &rec.finish(args, None, vec![]));
    out.commit()?;
    Ok(format!("{r_sam:?}"))
}
