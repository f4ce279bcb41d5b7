//! Davies–Bouldin index over dendrogram cuts: the label-free baseline.

use std::io::Write;

use log::warn;
use rayon::prelude::*;

use crate::data::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::grid::{normalized_area, KGrid};
use crate::hierclust::{Dendrogram, Partition};

/// Davies–Bouldin index: the mean over clusters of the worst ratio
/// `(S_i + S_j) / M_ij`, with `S` the mean member-to-centroid distance and
/// `M` the centroid distance. Lower is better.
///
/// Coincident centroids make the ratio undefined and are reported as an
/// error rather than an infinite index.
pub fn dbi(matrix: &EmbeddingMatrix, partition: &Partition) -> Result<f64> {
    if partition.len() != matrix.rows() {
        return Err(Error::Dimension(format!(
            "partition covers {} rows, matrix has {}",
            partition.len(),
            matrix.rows()
        )));
    }
    let k = partition.k();
    if k < 2 {
        return Err(Error::invalid(format!(
            "the Davies-Bouldin index needs at least 2 clusters, got {k}"
        )));
    }
    let d = matrix.dim();

    let mut centroids = vec![0f64; k * d];
    let mut counts = vec![0usize; k];
    for (row, &c) in matrix.iter_rows().zip(partition.assignment()) {
        counts[c] += 1;
        for (acc, &v) in centroids[c * d..(c + 1) * d].iter_mut().zip(row) {
            *acc += f64::from(v);
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        centroids[c * d..(c + 1) * d]
            .iter_mut()
            .for_each(|v| *v /= count as f64);
    }

    let mut scatter = vec![0f64; k];
    for (row, &c) in matrix.iter_rows().zip(partition.assignment()) {
        scatter[c] += euclidean(row.iter().map(|&v| f64::from(v)), &centroids[c * d..(c + 1) * d]);
    }
    for (s, &count) in scatter.iter_mut().zip(&counts) {
        *s /= count as f64;
    }

    let mut total = 0.0;
    for i in 0..k {
        let ci = &centroids[i * d..(i + 1) * d];
        let mut worst = f64::NEG_INFINITY;
        for j in (0..k).filter(|&j| j != i) {
            let sep = euclidean(ci.iter().copied(), &centroids[j * d..(j + 1) * d]);
            if sep == 0.0 {
                return Err(Error::numeric(format!(
                    "degenerate partition: clusters {i} and {j} share a centroid"
                )));
            }
            worst = worst.max((scatter[i] + scatter[j]) / sep);
        }
        total += worst;
    }
    Ok(total / k as f64)
}

fn euclidean(a: impl Iterator<Item = f64>, b: &[f64]) -> f64 {
    a.zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// DBI sampled over cluster counts.
#[derive(Debug, Clone, PartialEq)]
pub struct DbiCurve {
    pub points: Vec<(usize, f64)>,
    pub area: f64,
    /// Grid values dropped because their partition was degenerate.
    pub skipped: Vec<usize>,
}

impl DbiCurve {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,dbi")?;
        for (k, v) in &self.points {
            writeln!(w, "{k},{v}")?;
        }
        w.flush()
    }
}

/// DBI at every grid k (evaluated in parallel) and the normalized trapezoid
/// area under it. Degenerate cuts are skipped with a warning.
pub fn dbi_curve(matrix: &EmbeddingMatrix, dendrogram: &Dendrogram, grid: &KGrid) -> Result<DbiCurve> {
    if grid.first() < 2 {
        return Err(Error::invalid("the Davies-Bouldin grid must start at k >= 2"));
    }
    if dendrogram.leaves() != matrix.rows() {
        return Err(Error::Dimension(format!(
            "dendrogram has {} leaves, matrix has {} rows",
            dendrogram.leaves(),
            matrix.rows()
        )));
    }
    grid.check_within(2, matrix.rows())?;

    let evaluated: Vec<(usize, Result<f64>)> = grid
        .ks()
        .par_iter()
        .map(|&k| (k, dendrogram.cut(k).and_then(|p| dbi(matrix, &p))))
        .collect();

    let mut points = Vec::with_capacity(evaluated.len());
    let mut skipped = Vec::new();
    for (k, r) in evaluated {
        match r {
            Ok(v) => points.push((k, v)),
            Err(Error::Numeric(msg)) => {
                warn!("skipping k={k}: {msg}");
                skipped.push(k);
            }
            Err(e) => return Err(e),
        }
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|&(k, v)| (k as f64, v)).collect();
    let area = normalized_area(&xy)?;
    Ok(DbiCurve {
        points,
        area,
        skipped,
    })
}
