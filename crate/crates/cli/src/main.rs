//! `samkit`: structural alignment curves, Davies–Bouldin curves, budgeted
//! learning curves and their correlation, from the command line.

mod commands;
mod error;
mod manifest;
mod output;
mod svg;

use clap::{Parser, Subcommand};

use commands::{bow, correlate, dbi, lc, rerun, sam};

#[derive(Parser)]
#[command(name = "samkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ward-cluster a representation and score its alignment with the labels.
    Sam(sam::SamArgs),
    /// Davies–Bouldin index over the same dendrogram cuts.
    Dbi(dbi::DbiArgs),
    /// Budgeted learning curve of a max-entropy classifier.
    Lc(lc::LcArgs),
    /// Term-frequency bag-of-words vectors from a text dataset.
    Bow(bow::BowArgs),
    /// Pearson correlation of SAM (and DBI) with ALC across summaries.
    Correlate(correlate::CorrelateArgs),
    /// Repeat a run from its manifest.json.
    Rerun(rerun::RerunArgs),
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Sam(a) => sam::run(a),
        Command::Dbi(a) => dbi::run(a),
        Command::Lc(a) => lc::run(a),
        Command::Bow(a) => bow::run(a),
        Command::Correlate(a) => correlate::run(a),
        Command::Rerun(a) => rerun::run(a),
    };
    match result {
        Ok(line) => println!("{line}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
