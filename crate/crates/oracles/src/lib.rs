//! Slow, direct reference implementations. Nothing here shares code with
//! `samkit`; inputs are plain nested vectors.

/// `(left, right, height, size)` per merge, in merge order.
pub type NaiveMerge = (usize, usize, f64, usize);

/// Ward agglomeration recomputed from scratch at every step: all pairwise
/// costs `2·|A||B|/(|A|+|B|) · ‖c_A − c_B‖²` from member sums, the
/// smallest taken, ties broken by `(min id, max id)`. O(n³·d).
pub fn naive_ward(points: &[Vec<f64>]) -> Vec<NaiveMerge> {
    let n = points.len();
    let d = points[0].len();
    // (id, members)
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::with_capacity(n - 1);

    let sums = |members: &[usize]| -> Vec<f64> {
        let mut c = vec![0.0; d];
        for &m in members {
            for (cj, xj) in c.iter_mut().zip(&points[m]) {
                *cj += xj;
            }
        }
        c
    };

    while clusters.len() > 1 {
        let sum: Vec<Vec<f64>> = clusters.iter().map(|(_, m)| sums(m)).collect();
        let mut best: Option<(f64, (usize, usize), (usize, usize))> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let (na, nb) = (clusters[a].1.len() as f64, clusters[b].1.len() as f64);
                // ‖c_A − c_B‖² scaled by (|A||B|)², kept over sums
                let sq: f64 = sum[a]
                    .iter()
                    .zip(&sum[b])
                    .map(|(x, y)| (nb * x - na * y) * (nb * x - na * y))
                    .sum();
                let cost = 2.0 * sq / (na * nb * (na + nb));
                let (ia, ib) = (clusters[a].0, clusters[b].0);
                let key = (ia.min(ib), ia.max(ib));
                let better = match best {
                    None => true,
                    Some((c, k, _)) => cost < c || (cost == c && key < k),
                };
                if better {
                    best = Some((cost, key, (a, b)));
                }
            }
        }
        let (cost, (left, right), (a, b)) = best.unwrap();
        let mut members = clusters[a].1.clone();
        members.extend_from_slice(&clusters[b].1);
        let size = members.len();
        clusters.remove(b);
        clusters.remove(a);
        clusters.push((n + merges.len(), members));
        merges.push((left, right, cost.sqrt(), size));
    }
    merges
}

/// Average precision by enumerating every distinct score as a threshold:
/// at threshold `t` everything scoring `>= t` is predicted positive, and
/// precision is weighted by the recall gained since the previous threshold.
pub fn brute_force_ap(scores: &[f64], gold: &[bool]) -> f64 {
    let positives = gold.iter().filter(|&&g| g).count() as f64;
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    for t in thresholds {
        let mut tp = 0.0;
        let mut predicted = 0.0;
        for (s, g) in scores.iter().zip(gold) {
            if *s >= t {
                predicted += 1.0;
                if *g {
                    tp += 1.0;
                }
            }
        }
        let recall = tp / positives;
        ap += (recall - prev_recall) * (tp / predicted);
        prev_recall = recall;
    }
    ap
}

/// Davies–Bouldin index straight from its definition.
pub fn direct_dbi(points: &[Vec<f64>], assignment: &[usize]) -> f64 {
    let k = assignment.iter().max().unwrap() + 1;
    let d = points[0].len();
    let members: Vec<Vec<&Vec<f64>>> = (0..k)
        .map(|c| {
            points
                .iter()
                .zip(assignment)
                .filter(|(_, &a)| a == c)
                .map(|(p, _)| p)
                .collect()
        })
        .collect();
    let centroids: Vec<Vec<f64>> = members
        .iter()
        .map(|m| (0..d).map(|j| m.iter().map(|p| p[j]).sum::<f64>() / m.len() as f64).collect())
        .collect();
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    };
    let scatter: Vec<f64> = members
        .iter()
        .zip(&centroids)
        .map(|(m, c)| m.iter().map(|p| dist(p, c)).sum::<f64>() / m.len() as f64)
        .collect();
    let mut total = 0.0;
    for i in 0..k {
        let worst = (0..k)
            .filter(|&j| j != i)
            .map(|j| (scatter[i] + scatter[j]) / dist(&centroids[i], &centroids[j]))
            .fold(f64::NEG_INFINITY, f64::max);
        total += worst;
    }
    total / k as f64
}

/// Central finite-difference gradient with per-coordinate step `h`.
pub fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}
