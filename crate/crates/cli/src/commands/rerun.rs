use std::path::PathBuf;

use clap::Args;
use serde::de::DeserializeOwned;

use super::{absolute, bow, correlate, dbi, lc, sam};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    /// manifest.json of an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write outputs here instead of the recorded location.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn args_of<T: DeserializeOwned>(m: &RunManifest) -> Result<T> {
    serde_json::from_value(m.args.clone())
        .map_err(|e| CliError::invalid(format!("manifest arguments for `{}`: {e}", m.command)))
}

/// Verifies the recorded input digests, then repeats the run with the
/// recorded arguments.
pub fn run(args: RerunArgs) -> Result<String> {
    let manifest = RunManifest::read(&args.manifest)?;
    manifest.verify_inputs()?;
    let out = args.out.as_deref().map(absolute).transpose()?;
    match manifest.command.as_str() {
        "sam" => {
            let mut a: sam::SamArgs = args_of(&manifest)?;
            a.out = out.unwrap_or(a.out);
            sam::execute(&a)
        }
        "dbi" => {
            let mut a: dbi::DbiArgs = args_of(&manifest)?;
            a.out = out.unwrap_or(a.out);
            dbi::execute(&a)
        }
        "lc" => {
            let mut a: lc::LcArgs = args_of(&manifest)?;
            a.out = out.unwrap_or(a.out);
            lc::execute(&a)
        }
        "bow" => {
            let mut a: bow::BowArgs = args_of(&manifest)?;
            a.out = out.unwrap_or(a.out);
            bow::execute(&a)
        }
        "correlate" => {
            let mut a: correlate::CorrelateArgs = args_of(&manifest)?;
            a.out = out.unwrap_or(a.out);
            correlate::execute(&a)
        }
        other => Err(CliError::invalid(format!("unknown command `{other}` in manifest"))),
    }
}
