use std::collections::VecDeque;

use log::debug;

use crate::data::EmbeddingMatrix;
use crate::error::{Error, Result};

pub const GRADIENT_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 500;
const HISTORY: usize = 10;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Mean multinomial negative log-likelihood plus `l2/2 · ‖W‖²` (bias not
/// penalized). Parameters are packed as the `classes × dim` weight matrix,
/// row-major, followed by the `classes` biases.
pub struct MaxEntObjective<'a> {
    x: Vec<f64>,
    y: &'a [usize],
    dim: usize,
    classes: usize,
    l2: f64,
}

impl<'a> MaxEntObjective<'a> {
    pub fn new(x: &EmbeddingMatrix, y: &'a [usize], classes: usize, l2: f64) -> Self {
        MaxEntObjective {
            x: x.as_slice().iter().map(|&v| f64::from(v)).collect(),
            y,
            dim: x.dim(),
            classes,
            l2,
        }
    }

    pub fn num_params(&self) -> usize {
        self.classes * (self.dim + 1)
    }

    pub fn value(&self, theta: &[f64]) -> f64 {
        self.evaluate(theta, None)
    }

    pub fn value_and_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.num_params()];
        let f = self.evaluate(theta, Some(&mut grad));
        (f, grad)
    }

    fn evaluate(&self, theta: &[f64], mut grad: Option<&mut Vec<f64>>) -> f64 {
        let (d, l) = (self.dim, self.classes);
        let (weights, bias) = theta.split_at(l * d);
        let n = self.y.len();
        let mut logits = vec![0.0; l];
        let mut nll = 0.0;
        for (row, &y) in self.x.chunks_exact(d).zip(self.y) {
            for c in 0..l {
                logits[c] = bias[c] + dot(&weights[c * d..(c + 1) * d], row);
            }
            let lse = log_sum_exp(&logits);
            nll += lse - logits[y];
            if let Some(g) = grad.as_deref_mut() {
                let (gw, gb) = g.split_at_mut(l * d);
                for c in 0..l {
                    let residual = (logits[c] - lse).exp() - f64::from(u8::from(c == y));
                    gb[c] += residual;
                    for (gwj, &xj) in gw[c * d..(c + 1) * d].iter_mut().zip(row) {
                        *gwj += residual * xj;
                    }
                }
            }
        }
        let inv_n = 1.0 / n as f64;
        if let Some(g) = grad {
            for (j, gj) in g.iter_mut().enumerate() {
                *gj *= inv_n;
                if j < l * d {
                    *gj += self.l2 * weights[j];
                }
            }
        }
        nll * inv_n + 0.5 * self.l2 * dot(weights, weights)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Multinomial logistic regression ("max-entropy") classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntModel {
    pub classes: Vec<String>,
    pub dim: usize,
    /// `classes × dim`, row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub l2: f64,
    /// Training objective at the returned parameters.
    pub loss: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl MaxEntModel {
    pub fn predict_proba(&self, row: &[f32]) -> Vec<f64> {
        let d = self.dim;
        let logits: Vec<f64> = (0..self.classes.len())
            .map(|c| {
                self.bias[c]
                    + self.weights[c * d..(c + 1) * d]
                        .iter()
                        .zip(row)
                        .map(|(w, &x)| w * f64::from(x))
                        .sum::<f64>()
            })
            .collect();
        let lse = log_sum_exp(&logits);
        logits.iter().map(|z| (z - lse).exp()).collect()
    }

    /// Most probable class index; ties go to the lower index.
    pub fn predict(&self, row: &[f32]) -> usize {
        let p = self.predict_proba(row);
        let mut best = 0;
        for c in 1..p.len() {
            if p[c] > p[best] {
                best = c;
            }
        }
        best
    }

    pub fn weight_norm(&self) -> f64 {
        dot(&self.weights, &self.weights).sqrt()
    }
}

/// Fits weights and biases by full-batch L-BFGS with Armijo backtracking,
/// starting from zero, until the gradient's infinity norm drops below
/// [`GRADIENT_TOLERANCE`] or [`MAX_ITERATIONS`] is hit.
///
/// `y` holds class indices into `classes`; every class must occur.
pub fn train_maxent(
    x: &EmbeddingMatrix,
    y: &[usize],
    classes: &[String],
    l2: f64,
) -> Result<MaxEntModel> {
    if y.len() != x.rows() {
        return Err(Error::Dimension(format!(
            "{} labels for {} rows",
            y.len(),
            x.rows()
        )));
    }
    if !(l2 > 0.0 && l2.is_finite()) {
        return Err(Error::invalid(format!("l2 strength must be positive, got {l2}")));
    }
    if classes.len() < 2 {
        return Err(Error::invalid("need at least 2 classes"));
    }
    let mut seen = vec![false; classes.len()];
    for &c in y {
        *seen.get_mut(c).ok_or_else(|| Error::invalid(format!("label index {c} out of range")))? =
            true;
    }
    if let Some(c) = seen.iter().position(|s| !s) {
        return Err(Error::invalid(format!(
            "class `{}` is absent from the training labels",
            classes[c]
        )));
    }

    let objective = MaxEntObjective::new(x, y, classes.len(), l2);
    let fit = lbfgs(&objective)?;
    let (weights, bias) = fit.theta.split_at(classes.len() * x.dim());
    Ok(MaxEntModel {
        classes: classes.to_vec(),
        dim: x.dim(),
        weights: weights.to_vec(),
        bias: bias.to_vec(),
        l2,
        loss: fit.loss,
        iterations: fit.iterations,
        converged: fit.converged,
    })
}

struct Fit {
    theta: Vec<f64>,
    loss: f64,
    iterations: usize,
    converged: bool,
}

fn lbfgs(objective: &MaxEntObjective) -> Result<Fit> {
    let mut theta = vec![0.0; objective.num_params()];
    let (mut f, mut g) = objective.value_and_gradient(&theta);
    if !f.is_finite() {
        return Err(Error::numeric("training loss is not finite at initialization"));
    }
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(HISTORY);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        if inf_norm(&g) < GRADIENT_TOLERANCE {
            converged = true;
            break;
        }
        let mut dir = two_loop(&g, &history);
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut step = if history.is_empty() {
            (1.0 / dot(&g, &g).sqrt()).min(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate: Vec<f64> = theta.iter().zip(&dir).map(|(t, d)| t + step * d).collect();
            let (fc, gc) = objective.value_and_gradient(&candidate);
            if fc.is_finite() && fc <= f + ARMIJO * step * slope {
                accepted = Some((candidate, fc, gc));
                break;
            }
            step *= 0.5;
        }
        let Some((next, f_next, g_next)) = accepted else {
            debug!("line search stalled at loss {f} after {iterations} iterations");
            break;
        };

        let s: Vec<f64> = next.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_next.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&yv, &yv).sqrt() && sy > 0.0 {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, yv, 1.0 / sy));
        }
        theta = next;
        f = f_next;
        g = g_next;
        iterations += 1;
    }
    if !converged && inf_norm(&g) < GRADIENT_TOLERANCE {
        converged = true;
    }
    if !f.is_finite() {
        return Err(Error::numeric("training loss became non-finite"));
    }
    Ok(Fit {
        theta,
        loss: f,
        iterations,
        converged,
    })
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Two-loop recursion: applies the inverse-Hessian estimate to `-grad`.
fn two_loop(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = grad.iter().map(|v| -v).collect();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= alpha * yi);
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), alpha) in history.iter().zip(alphas.iter().rev()) {
        let beta = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (alpha - beta) * si);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes() -> Vec<String> {
        vec!["neg".into(), "pos".into()]
    }

    #[test]
    fn separable_line() {
        let x = EmbeddingMatrix::from_rows(&[[-1.0f32], [1.0], [-2.0], [2.0]]).unwrap();
        let y = [0, 1, 0, 1];
        let m = train_maxent(&x, &y, &classes(), 1e-3).unwrap();
        assert!(m.converged);
        for (row, &label) in x.iter_rows().zip(&y) {
            assert_eq!(m.predict(row), label);
        }
    }

    #[test]
    fn heavy_regularization_gives_priors() {
        let x = EmbeddingMatrix::from_rows(&[[-1.0f32], [1.0], [0.5], [2.0]]).unwrap();
        let y = [0, 1, 1, 1];
        let m = train_maxent(&x, &y, &classes(), 1e6).unwrap();
        assert!(m.weight_norm() < 1e-2);
        let p = m.predict_proba(&[0.3]);
        assert!((p[1] - 0.75).abs() < 1e-3, "{p:?}");
    }

    #[test]
    fn missing_class_rejected() {
        let x = EmbeddingMatrix::from_rows(&[[1.0f32], [2.0]]).unwrap();
        let err = train_maxent(&x, &[1, 1], &classes(), 1.0).unwrap_err();
        assert!(err.to_string().contains("neg"));
        assert!(train_maxent(&x, &[0, 1], &classes(), 0.0).is_err());
    }

    #[test]
    fn converged_loss_below_start() {
        let x = EmbeddingMatrix::from_rows(&[[0.2f32, 1.0], [1.0, -0.3], [-0.7, 0.1], [0.4, 0.4]])
            .unwrap();
        let y = [0, 1, 0, 1];
        let obj = MaxEntObjective::new(&x, &y, 2, 0.1);
        let start = obj.value(&vec![0.0; obj.num_params()]);
        let m = train_maxent(&x, &y, &classes(), 0.1).unwrap();
        assert!(m.loss <= start);
        assert!((start - 2f64.ln()).abs() < 1e-12);
    }
}
