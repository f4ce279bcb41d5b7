#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use samkit::data::{save_vectors, write_labels_tsv};
use samkit::synthetic::{add_isotropic_noise, dataset_from_labels, gaussian_blobs};
use samkit::EmbeddingMatrix;

pub fn samkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_samkit"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub fn write_labels<S: ToString>(path: &Path, labels: &[S]) {
    let ds = dataset_from_labels(labels).unwrap();
    write_labels_tsv(std::fs::File::create(path).unwrap(), &ds).unwrap();
}

/// Two well separated 2-D blobs of 15 points, labeled by blob.
pub fn two_blob_fixture(dir: &Path) -> (PathBuf, PathBuf, Vec<String>) {
    let (m, blob) = gaussian_blobs(&[vec![0.0, 0.0], vec![25.0, 25.0]], 15, 1.0, 3).unwrap();
    let labels: Vec<String> = blob.iter().map(|&b| if b == 0 { "a" } else { "b" }.to_string()).collect();
    let vectors = dir.join("blobs.samv");
    let label_path = dir.join("blobs.labels.tsv");
    save_vectors(&vectors, &m).unwrap();
    write_labels(&label_path, &labels);
    (vectors, label_path, labels)
}

/// Labeled blob data and a ladder of increasingly noisy copies of it.
pub struct Ladder {
    pub clean: EmbeddingMatrix,
    pub labels: Vec<String>,
}

/// `blobs` Gaussian blobs in `dim` dimensions, `per_blob` points each; blob
/// `b` carries label `b % classes`.
pub fn blob_dataset(blobs: usize, dim: usize, per_blob: usize, classes: usize, seed: u64) -> Ladder {
    let centers = samkit::synthetic::random_centers(blobs, dim, 4.0, seed);
    let (clean, blob) = gaussian_blobs(&centers, per_blob, 1.0, seed + 1).unwrap();
    let labels = blob.iter().map(|&b| format!("c{}", b % classes)).collect();
    Ladder { clean, labels }
}

impl Ladder {
    pub fn noisy(&self, sigma: f64, seed: u64) -> EmbeddingMatrix {
        if sigma == 0.0 {
            self.clean.clone()
        } else {
            add_isotropic_noise(&self.clean, sigma, seed)
        }
    }
}
