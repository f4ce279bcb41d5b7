use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::hierclust::Partition;

/// Cluster-conditional label distribution of every sample: entry `(i, l)` is
/// the fraction of sample `i`'s cluster carrying label `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    classes: Vec<String>,
    scores: Vec<f64>,
}

impl ScoreTable {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn rows(&self) -> usize {
        self.scores.len() / self.classes.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let l = self.classes.len();
        &self.scores[i * l..(i + 1) * l]
    }

    pub fn get(&self, i: usize, class: usize) -> f64 {
        self.scores[i * self.classes.len() + class]
    }

    pub fn column(&self, class: usize) -> Vec<f64> {
        self.scores
            .chunks_exact(self.classes.len())
            .map(|r| r[class])
            .collect()
    }
}

pub fn cluster_scores(partition: &Partition, dataset: &LabeledDataset) -> Result<ScoreTable> {
    if partition.len() != dataset.len() {
        return Err(Error::Dimension(format!(
            "partition covers {} samples, dataset has {}",
            partition.len(),
            dataset.len()
        )));
    }
    let l = dataset.classes().len();
    let k = partition.k();
    let mut hist = vec![0usize; k * l];
    let mut size = vec![0usize; k];
    for (&c, &y) in partition.assignment().iter().zip(dataset.label_codes()) {
        hist[c * l + y] += 1;
        size[c] += 1;
    }
    let mut scores = Vec::with_capacity(dataset.len() * l);
    for &c in partition.assignment() {
        let s = size[c] as f64;
        scores.extend(hist[c * l..(c + 1) * l].iter().map(|&h| h as f64 / s));
    }
    Ok(ScoreTable {
        classes: dataset.classes().to_vec(),
        scores,
    })
}
