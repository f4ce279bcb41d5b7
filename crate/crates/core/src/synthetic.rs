//! Seeded synthetic data: Gaussian blobs, isotropic noise and label
//! shuffles. Used by the test suites and handy for smoke-testing a pipeline.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::data::{EmbeddingMatrix, LabeledDataset};
use crate::error::{Error, Result};

/// `per_blob` points around each center with isotropic standard deviation
/// `spread`. Returns the matrix and the blob index of every row; rows are
/// grouped blob by blob.
pub fn gaussian_blobs(
    centers: &[Vec<f64>],
    per_blob: usize,
    spread: f64,
    seed: u64,
) -> Result<(EmbeddingMatrix, Vec<usize>)> {
    let dim = centers.first().map(Vec::len).unwrap_or(0);
    if centers.iter().any(|c| c.len() != dim) {
        return Err(Error::Dimension("blob centers differ in dimension".into()));
    }
    let noise = Normal::new(0.0, spread).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(centers.len() * per_blob * dim);
    let mut blob = Vec::with_capacity(centers.len() * per_blob);
    for (b, c) in centers.iter().enumerate() {
        for _ in 0..per_blob {
            data.extend(c.iter().map(|&x| (x + noise.sample(&mut rng)) as f32));
            blob.push(b);
        }
    }
    Ok((EmbeddingMatrix::new(blob.len(), dim, data)?, blob))
}

/// `count` centers drawn from a standard normal scaled by `scale`.
pub fn random_centers(count: usize, dim: usize, scale: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    scale * z
                })
                .collect::<Vec<f64>>()
        })
        .collect()
}

/// Adds independent `N(0, sigma²)` noise to every entry.
pub fn add_isotropic_noise(m: &EmbeddingMatrix, sigma: f64, seed: u64) -> EmbeddingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = m
        .as_slice()
        .iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (f64::from(v) + sigma * z) as f32
        })
        .collect();
    EmbeddingMatrix::new(m.rows(), m.dim(), data).expect("finite noise keeps the matrix valid")
}

/// Dataset with ids `s0, s1, ...` and the given labels.
pub fn dataset_from_labels<S: ToString>(labels: &[S]) -> Result<LabeledDataset> {
    LabeledDataset::new(
        (0..labels.len()).map(|i| format!("s{i}")).collect(),
        labels.iter().map(ToString::to_string).collect(),
        None,
    )
}

/// Uniform random permutation of `labels`.
pub fn shuffled<T: Clone>(labels: &[T], seed: u64) -> Vec<T> {
    let mut out = labels.to_vec();
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    out
}
