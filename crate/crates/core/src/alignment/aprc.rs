use crate::error::{Error, Result};

/// Average precision with tied scores collapsed into a single threshold.
///
/// Scores are visited in descending order; each run of equal scores is one
/// step contributing `ΔRecall × precision` measured at the end of the run.
/// A constant score vector therefore yields exactly the positive prevalence.
pub fn aprc(scores: &[f64], gold: &[bool]) -> Result<f64> {
    if scores.len() != gold.len() {
        return Err(Error::Dimension(format!(
            "{} scores but {} gold labels",
            scores.len(),
            gold.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::numeric("scores must be finite"));
    }
    let positives = gold.iter().filter(|&&g| g).count();
    if positives == 0 {
        return Err(Error::invalid(
            "precision-recall area is undefined without positive samples",
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut groups = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (mut tp, mut count) = (0usize, 0usize);
        while i < order.len() && scores[order[i]] == s {
            tp += usize::from(gold[order[i]]);
            count += 1;
            i += 1;
        }
        groups.push((tp, count));
    }
    Ok(average_precision(groups, positives))
}

/// Sums `ΔRecall × precision` over `(true positives, members)` threshold
/// groups given in descending score order.
pub(crate) fn average_precision(
    groups: impl IntoIterator<Item = (usize, usize)>,
    positives: usize,
) -> f64 {
    let p = positives as f64;
    let (mut tp, mut seen) = (0usize, 0usize);
    let mut ap = 0.0;
    for (group_tp, group_n) in groups {
        tp += group_tp;
        seen += group_n;
        if group_tp > 0 {
            ap += (group_tp as f64 / p) * (tp as f64 / seen as f64);
        }
    }
    ap
}
