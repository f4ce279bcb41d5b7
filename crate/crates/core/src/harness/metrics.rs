use serde::{Deserialize, Serialize};

use super::MaxEntModel;
use crate::alignment::aprc;
use crate::data::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Test-set score used for learning curves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[default]
    #[serde(rename = "accuracy")]
    Accuracy,
    /// F1 of the target class.
    #[serde(rename = "f1-target")]
    F1Target,
    /// Precision-recall area of the target class, or the class mean when no
    /// target is set.
    #[serde(rename = "aprc")]
    Aprc,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::F1Target => "f1-target",
            Metric::Aprc => "aprc",
        }
    }
}

pub fn accuracy(predicted: &[usize], gold: &[usize]) -> f64 {
    let correct = predicted.iter().zip(gold).filter(|(p, g)| p == g).count();
    correct as f64 / gold.len() as f64
}

/// Harmonic mean of precision and recall of `target`; 0 when both vanish.
pub fn f1(predicted: &[usize], gold: &[usize], target: usize) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &g) in predicted.iter().zip(gold) {
        match (p == target, g == target) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Scores `model` on rows of `x` against gold labels given as strings.
pub fn evaluate(
    model: &MaxEntModel,
    x: &EmbeddingMatrix,
    y: &[String],
    metric: Metric,
    target: Option<&str>,
) -> Result<f64> {
    let codes = y
        .iter()
        .map(|label| {
            model
                .classes
                .iter()
                .position(|c| c == label)
                .ok_or_else(|| Error::invalid(format!("label `{label}` unknown to the model")))
        })
        .collect::<Result<Vec<_>>>()?;
    let target = target
        .map(|t| {
            model
                .classes
                .iter()
                .position(|c| c == t)
                .ok_or_else(|| Error::invalid(format!("target `{t}` unknown to the model")))
        })
        .transpose()?;
    let rows: Vec<usize> = (0..x.rows()).collect();
    score_rows(model, x, &rows, &codes, metric, target)
}

/// Scores `model` on the selected rows; `gold[i]` belongs to `rows[i]`.
pub(crate) fn score_rows(
    model: &MaxEntModel,
    x: &EmbeddingMatrix,
    rows: &[usize],
    gold: &[usize],
    metric: Metric,
    target: Option<usize>,
) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::invalid("cannot score an empty evaluation set"));
    }
    match metric {
        Metric::Accuracy => {
            let pred: Vec<usize> = rows.iter().map(|&r| model.predict(x.row(r))).collect();
            Ok(accuracy(&pred, gold))
        }
        Metric::F1Target => {
            let target = target.ok_or_else(|| Error::invalid("f1-target needs a target label"))?;
            let pred: Vec<usize> = rows.iter().map(|&r| model.predict(x.row(r))).collect();
            Ok(f1(&pred, gold, target))
        }
        Metric::Aprc => {
            let probs: Vec<Vec<f64>> = rows.iter().map(|&r| model.predict_proba(x.row(r))).collect();
            let classes: Vec<usize> = match target {
                Some(t) => vec![t],
                None => (0..model.classes.len()).collect(),
            };
            let mut total = 0.0;
            let mut used = 0;
            for c in classes {
                let is_pos: Vec<bool> = gold.iter().map(|&g| g == c).collect();
                if !is_pos.contains(&true) {
                    continue;
                }
                let scores: Vec<f64> = probs.iter().map(|p| p[c]).collect();
                total += aprc(&scores, &is_pos)?;
                used += 1;
            }
            if used == 0 {
                return Err(Error::invalid("evaluation set has no positives for the scored class"));
            }
            Ok(total / used as f64)
        }
    }
}
