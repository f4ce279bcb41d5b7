use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::aprc::{aprc, average_precision};
use super::scores::cluster_scores;
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::grid::{normalized_area, KGrid};
use crate::hierclust::{Dendrogram, Partition};

/// Which precision-recall areas make up an alignment score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "target", rename_all = "lowercase")]
pub enum AlignmentMode {
    /// Unweighted mean of the per-class areas.
    Balanced,
    /// Area of one positive class.
    Target(String),
}

impl AlignmentMode {
    pub fn name(&self) -> &'static str {
        match self {
            AlignmentMode::Balanced => "balanced",
            AlignmentMode::Target(_) => "target",
        }
    }

    pub fn target(&self) -> Option<&str> {
        match self {
            AlignmentMode::Balanced => None,
            AlignmentMode::Target(t) => Some(t),
        }
    }

    /// Class indices whose areas get averaged.
    fn classes(&self, dataset: &LabeledDataset) -> Result<Vec<usize>> {
        match self {
            AlignmentMode::Balanced => Ok((0..dataset.classes().len()).collect()),
            AlignmentMode::Target(t) => dataset
                .class_index(t)
                .map(|c| vec![c])
                .ok_or_else(|| Error::invalid(format!("target label `{t}` does not occur in the dataset"))),
        }
    }
}

/// Alignment of one partition with the gold labels.
pub fn alignment_score(
    partition: &Partition,
    dataset: &LabeledDataset,
    mode: &AlignmentMode,
) -> Result<f64> {
    let classes = mode.classes(dataset)?;
    let table = cluster_scores(partition, dataset)?;
    let mut total = 0.0;
    for &c in &classes {
        let gold: Vec<bool> = dataset.label_codes().iter().map(|&y| y == c).collect();
        total += aprc(&table.column(c), &gold)?;
    }
    Ok(total / classes.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub a: f64,
}

/// Alignment score sampled over partition sizes, plus its normalized area.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentCurve {
    points: Vec<CurvePoint>,
    mode: AlignmentMode,
    sam: f64,
}

impl AlignmentCurve {
    pub fn new(points: Vec<CurvePoint>, mode: AlignmentMode) -> Result<Self> {
        let sam = sam_area(&points)?;
        Ok(AlignmentCurve { points, mode, sam })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn mode(&self) -> &AlignmentMode {
        &self.mode
    }

    pub fn sam(&self) -> f64 {
        self.sam
    }

    pub fn k_min(&self) -> usize {
        self.points[0].k
    }

    pub fn k_max(&self) -> usize {
        self.points[self.points.len() - 1].k
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,a")?;
        for p in &self.points {
            writeln!(w, "{},{}", p.k, p.a)?;
        }
        w.flush()
    }
}

/// Normalized trapezoid area under `a(k)`: the integral over k divided by
/// `k_max - k_min`.
pub fn sam_area(points: &[CurvePoint]) -> Result<f64> {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.k as f64, p.a)).collect();
    normalized_area(&xy)
}

/// Evaluates the alignment score at every grid k by replaying the merge
/// sequence once and keeping per-cluster label histograms, instead of
/// cutting the tree anew for each k.
pub fn alignment_curve(
    dendrogram: &Dendrogram,
    dataset: &LabeledDataset,
    grid: &KGrid,
    mode: &AlignmentMode,
) -> Result<AlignmentCurve> {
    let n = dendrogram.leaves();
    if dataset.len() != n {
        return Err(Error::Dimension(format!(
            "dendrogram has {n} leaves, dataset has {} samples",
            dataset.len()
        )));
    }
    grid.check_within(1, n)?;
    let classes = mode.classes(dataset)?;
    let counts = dataset.class_counts();
    let l = dataset.classes().len();

    let mut hist = vec![0usize; (2 * n - 1) * l];
    let mut size = vec![1usize; 2 * n - 1];
    for (i, &y) in dataset.label_codes().iter().enumerate() {
        hist[i * l + y] = 1;
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut pos: Vec<usize> = (0..2 * n - 1).collect();
    let remove = |active: &mut Vec<usize>, pos: &mut Vec<usize>, node: usize| {
        let p = pos[node];
        active.swap_remove(p);
        if p < active.len() {
            pos[active[p]] = p;
        }
    };

    let mut applied = 0;
    let mut points = Vec::with_capacity(grid.len());
    let mut scratch = Vec::new();
    for &k in grid.ks().iter().rev() {
        while applied < n - k {
            let m = dendrogram.merges()[applied];
            let id = n + applied;
            for j in 0..l {
                hist[id * l + j] = hist[m.left * l + j] + hist[m.right * l + j];
            }
            size[id] = size[m.left] + size[m.right];
            remove(&mut active, &mut pos, m.left);
            remove(&mut active, &mut pos, m.right);
            pos[id] = active.len();
            active.push(id);
            applied += 1;
        }

        let mut total = 0.0;
        for &c in &classes {
            scratch.clear();
            scratch.extend(active.iter().map(|&node| (hist[node * l + c], size[node])));
            total += cluster_level_ap(&mut scratch, counts[c]);
        }
        points.push(CurvePoint {
            k,
            a: total / classes.len() as f64,
        });
    }
    points.reverse();
    AlignmentCurve::new(points, mode.clone())
}

/// Average precision when every member of a cluster shares the score
/// `hits / size`. Clusters with equal fractions form one threshold group.
fn cluster_level_ap(clusters: &mut [(usize, usize)], positives: usize) -> f64 {
    let by_fraction_desc = |a: &(usize, usize), b: &(usize, usize)| -> Ordering {
        let lhs = b.0 as u128 * a.1 as u128;
        let rhs = a.0 as u128 * b.1 as u128;
        lhs.cmp(&rhs)
    };
    clusters.sort_unstable_by(by_fraction_desc);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < clusters.len() {
        let head = clusters[i];
        let (mut tp, mut count) = (0, 0);
        while i < clusters.len() && by_fraction_desc(&head, &clusters[i]) == Ordering::Equal {
            tp += clusters[i].0;
            count += clusters[i].1;
            i += 1;
        }
        groups.push((tp, count));
    }
    average_precision(groups, positives)
}
