use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use log::warn;
use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::maxent::train_maxent;
use super::metrics::{score_rows, Metric};
use super::stats::{mean, sample_std};
use crate::data::{EmbeddingMatrix, LabeledDataset};
use crate::error::{Error, Result};

fn default_budgets() -> Vec<usize> {
    (1..=10).map(|i| i * 100).collect()
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

fn default_folds() -> usize {
    5
}

fn default_l2_grid() -> Vec<f64> {
    vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0]
}

fn default_test_fraction() -> f64 {
    0.2
}

fn default_max_resample() -> usize {
    100
}

/// Learning-curve experiment, usually read from a JSON file.
///
/// Input paths are interpreted by the caller; [`learning_curve`] only
/// reads `test_ids` when a held-out id list is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_budgets")]
    pub budgets: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_l2_grid")]
    pub l2_grid: Vec<f64>,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub target: Option<String>,
    #[serde(default)]
    pub representation: String,
    #[serde(default)]
    pub dataset: Option<String>,
    #[serde(default)]
    pub vectors: Option<PathBuf>,
    #[serde(default)]
    pub labels: Option<PathBuf>,
    /// File with one held-out id per line. Without it a random
    /// `test_fraction` of the rows is held out using `split_seed`.
    #[serde(default)]
    pub test_ids: Option<PathBuf>,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default)]
    pub split_seed: u64,
    /// Redraws allowed per cell when a budget sample misses a class.
    #[serde(default = "default_max_resample")]
    pub max_resample: usize,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn validate(&self, pool_size: usize) -> Result<()> {
        if self.budgets.is_empty() {
            return Err(Error::invalid("no budgets given"));
        }
        if !self.budgets.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("budgets must be strictly increasing"));
        }
        if let Some(&b) = self.budgets.iter().find(|&&b| b > pool_size) {
            return Err(Error::invalid(format!(
                "budget {b} exceeds the training pool of {pool_size} samples"
            )));
        }
        if self.folds < 2 {
            return Err(Error::invalid(format!("need at least 2 folds, got {}", self.folds)));
        }
        if let Some(&b) = self.budgets.iter().find(|&&b| b < self.folds) {
            return Err(Error::invalid(format!(
                "budget {b} is smaller than the fold count {}",
                self.folds
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("no seeds given"));
        }
        if self.l2_grid.is_empty() || self.l2_grid.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::invalid("l2 grid must be non-empty and positive"));
        }
        if self.metric == Metric::F1Target && self.target.is_none() {
            return Err(Error::invalid("metric f1-target needs a target label"));
        }
        Ok(())
    }
}

/// Disjoint training pool and fixed test rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainTestSplit {
    pub pool: Vec<usize>,
    pub test: Vec<usize>,
}

impl TrainTestSplit {
    /// Holds out `round(n · fraction)` uniformly chosen rows.
    pub fn holdout(n: usize, fraction: f64, seed: u64) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::invalid(format!("test fraction {fraction} outside (0, 1)")));
        }
        let n_test = ((n as f64) * fraction).round() as usize;
        if n_test == 0 || n_test >= n {
            return Err(Error::invalid(format!(
                "holding out {n_test} of {n} rows leaves an empty side"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut test = perm[..n_test].to_vec();
        let mut pool = perm[n_test..].to_vec();
        test.sort_unstable();
        pool.sort_unstable();
        Ok(TrainTestSplit { pool, test })
    }

    pub fn from_test_ids(dataset: &LabeledDataset, ids: &[String]) -> Result<Self> {
        let lookup: HashMap<&str, usize> = dataset
            .ids()
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut is_test = vec![false; dataset.len()];
        for id in ids {
            let &i = lookup
                .get(id.as_str())
                .ok_or_else(|| Error::invalid(format!("test id `{id}` is not in the dataset")))?;
            is_test[i] = true;
        }
        let (test, pool): (Vec<usize>, Vec<usize>) = (0..dataset.len()).partition(|&i| is_test[i]);
        if test.is_empty() || pool.is_empty() {
            return Err(Error::invalid("test ids leave an empty training pool or test set"));
        }
        Ok(TrainTestSplit { pool, test })
    }

    pub fn from_config(config: &ExperimentConfig, dataset: &LabeledDataset) -> Result<Self> {
        match &config.test_ids {
            Some(path) => {
                let ids = read_id_list(path)?;
                TrainTestSplit::from_test_ids(dataset, &ids)
            }
            None => TrainTestSplit::holdout(dataset.len(), config.test_fraction, config.split_seed),
        }
    }
}

fn read_id_list(path: &Path) -> Result<Vec<String>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut ids = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if !line.is_empty() {
            ids.push(line.to_string());
        }
    }
    Ok(ids)
}

/// Train/validation index sets into `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
}

/// Shuffles `0..n` and cuts it into `folds` contiguous, near-equal blocks;
/// each block validates once while the rest train.
pub fn cv_folds(n: usize, folds: usize, rng: &mut ChaCha8Rng) -> Vec<Fold> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    (0..folds)
        .map(|f| {
            let (lo, hi) = (f * n / folds, (f + 1) * n / folds);
            let valid = perm[lo..hi].to_vec();
            let train = perm[..lo].iter().chain(&perm[hi..]).copied().collect();
            Fold { train, valid }
        })
        .collect()
}

/// Outcome of one `(seed, budget)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub seed: u64,
    #[serde(rename = "N")]
    pub budget: usize,
    pub chosen_l2: f64,
    pub cv_score: f64,
    pub test_score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningPoint {
    pub budget: usize,
    pub mean: f64,
    pub std: f64,
}

/// Test score per budget, averaged over seeds. `alc` is the unweighted mean
/// of the per-budget means.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub metric: Metric,
    pub points: Vec<LearningPoint>,
    pub alc: f64,
}

impl LearningCurve {
    pub fn new(metric: Metric, points: Vec<LearningPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a learning curve needs at least one budget"));
        }
        if !points.windows(2).all(|w| w[0].budget < w[1].budget) {
            return Err(Error::invalid("budgets must be strictly increasing"));
        }
        let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
        let alc = mean(&means);
        Ok(LearningCurve { metric, points, alc })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "N,mean,std")?;
        for p in &self.points {
            writeln!(w, "{},{},{}", p.budget, p.mean, p.std)?;
        }
        w.flush()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurveRun {
    pub curve: LearningCurve,
    /// Cells ordered by seed, then budget.
    pub cells: Vec<CellRecord>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-cell RNG seed; cells never share a stream.
pub fn cell_seed(seed: u64, budget: usize) -> u64 {
    splitmix64(seed ^ splitmix64(budget as u64))
}

/// Runs the budgeted learning protocol.
///
/// For every seed and budget N: draw N pool rows uniformly (redrawing if a
/// class is missing), pick the l2 strength with the best mean validation
/// score under k-fold CV, refit on all N rows and score the fixed test set.
/// Cells run in parallel and are deterministic given the config.
pub fn learning_curve(
    config: &ExperimentConfig,
    dataset: &LabeledDataset,
    vectors: &EmbeddingMatrix,
) -> Result<LearningCurveRun> {
    if vectors.rows() != dataset.len() {
        return Err(Error::Dimension(format!(
            "{} vector rows for {} samples",
            vectors.rows(),
            dataset.len()
        )));
    }
    let split = TrainTestSplit::from_config(config, dataset)?;
    learning_curve_with_split(config, dataset, vectors, &split)
}

pub fn learning_curve_with_split(
    config: &ExperimentConfig,
    dataset: &LabeledDataset,
    vectors: &EmbeddingMatrix,
    split: &TrainTestSplit,
) -> Result<LearningCurveRun> {
    config.validate(split.pool.len())?;
    let target = config
        .target
        .as_deref()
        .map(|t| {
            dataset
                .class_index(t)
                .ok_or_else(|| Error::invalid(format!("target label `{t}` does not occur in the dataset")))
        })
        .transpose()?;

    let cells: Vec<(u64, usize)> = config
        .seeds
        .iter()
        .flat_map(|&s| config.budgets.iter().map(move |&b| (s, b)))
        .collect();
    let job = CellJob {
        config,
        dataset,
        vectors,
        split,
        target,
    };
    let run = || -> Result<Vec<CellRecord>> {
        cells.par_iter().map(|&(s, b)| job.run(s, b)).collect()
    };
    let records = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let points = config
        .budgets
        .iter()
        .map(|&b| {
            let scores: Vec<f64> = records
                .iter()
                .filter(|r| r.budget == b)
                .map(|r| r.test_score)
                .collect();
            LearningPoint {
                budget: b,
                mean: mean(&scores),
                std: sample_std(&scores),
            }
        })
        .collect();
    Ok(LearningCurveRun {
        curve: LearningCurve::new(config.metric, points)?,
        cells: records,
    })
}

struct CellJob<'a> {
    config: &'a ExperimentConfig,
    dataset: &'a LabeledDataset,
    vectors: &'a EmbeddingMatrix,
    split: &'a TrainTestSplit,
    target: Option<usize>,
}

impl CellJob<'_> {
    fn run(&self, seed: u64, budget: usize) -> Result<CellRecord> {
        let classes = self.dataset.classes();
        let codes = self.dataset.label_codes();
        let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(seed, budget));

        let sample = self.draw_budget(&mut rng, seed, budget)?;
        let folds = cv_folds(budget, self.config.folds, &mut rng);

        let mut best: Option<(f64, f64)> = None;
        for &l2 in &self.config.l2_grid {
            let mut scores = Vec::with_capacity(folds.len());
            for (f, fold) in folds.iter().enumerate() {
                let train_rows: Vec<usize> = fold.train.iter().map(|&i| sample[i]).collect();
                let train_y: Vec<usize> = train_rows.iter().map(|&r| codes[r]).collect();
                let x = self.vectors.select_rows(&train_rows);
                let model = match train_maxent(&x, &train_y, classes, l2) {
                    Ok(m) => m,
                    Err(Error::Invalid(msg)) => {
                        warn!("seed {seed}, N={budget}, fold {f}: skipped ({msg})");
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let valid_rows: Vec<usize> = fold.valid.iter().map(|&i| sample[i]).collect();
                let valid_y: Vec<usize> = valid_rows.iter().map(|&r| codes[r]).collect();
                match score_rows(&model, self.vectors, &valid_rows, &valid_y, self.config.metric, self.target) {
                    Ok(s) => scores.push(s),
                    Err(Error::Invalid(msg)) => {
                        warn!("seed {seed}, N={budget}, fold {f}: not scored ({msg})");
                    }
                    Err(e) => return Err(e),
                }
            }
            if scores.is_empty() {
                continue;
            }
            let cv = mean(&scores);
            if best.is_none_or(|(_, b)| cv > b) {
                best = Some((l2, cv));
            }
        }
        let (chosen_l2, cv_score) = best.ok_or_else(|| {
            Error::numeric(format!("seed {seed}, N={budget}: no cross-validation fold could be scored"))
        })?;

        let y: Vec<usize> = sample.iter().map(|&r| codes[r]).collect();
        let model = train_maxent(&self.vectors.select_rows(&sample), &y, classes, chosen_l2)?;
        let test_y: Vec<usize> = self.split.test.iter().map(|&r| codes[r]).collect();
        let test_score = score_rows(
            &model,
            self.vectors,
            &self.split.test,
            &test_y,
            self.config.metric,
            self.target,
        )?;
        Ok(CellRecord {
            seed,
            budget,
            chosen_l2,
            cv_score,
            test_score,
        })
    }

    /// Pool rows of one budget sample, covering every class.
    fn draw_budget(&self, rng: &mut ChaCha8Rng, seed: u64, budget: usize) -> Result<Vec<usize>> {
        let pool = &self.split.pool;
        let codes = self.dataset.label_codes();
        let n_classes = self.dataset.classes().len();
        for attempt in 0..=self.config.max_resample {
            let sample: Vec<usize> = index::sample(rng, pool.len(), budget)
                .into_iter()
                .map(|i| pool[i])
                .collect();
            let mut present = vec![false; n_classes];
            sample.iter().for_each(|&r| present[codes[r]] = true);
            if present.iter().all(|&p| p) {
                return Ok(sample);
            }
            warn!("seed {seed}, N={budget}: draw {attempt} misses a class, redrawing");
        }
        Err(Error::invalid(format!(
            "seed {seed}, N={budget}: no draw covered every class after {} attempts",
            self.config.max_resample + 1
        )))
    }
}
