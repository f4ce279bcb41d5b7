//! Cluster-count grids and the normalized trapezoid area used by every curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Up to this many partition sizes the automatic grid visits every k.
pub const FULL_GRID_LIMIT: usize = 2000;
const DENSE_PREFIX: usize = 100;
const GEOMETRIC_POINTS: usize = 300;

/// How a grid was requested; recorded next to curve outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSpec {
    /// Every k in `[k_min, k_max]`.
    Full,
    /// Every k up to `FULL_GRID_LIMIT` points, otherwise a dense prefix
    /// followed by geometric spacing.
    Auto,
}

/// Strictly increasing cluster counts, at least two of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KGrid(Vec<usize>);

impl KGrid {
    pub fn new(mut ks: Vec<usize>) -> Result<Self> {
        ks.sort_unstable();
        ks.dedup();
        if ks.len() < 2 {
            return Err(Error::invalid(format!(
                "a grid needs at least 2 distinct cluster counts, got {ks:?}"
            )));
        }
        if ks[0] == 0 {
            return Err(Error::invalid("cluster counts start at 1"));
        }
        Ok(KGrid(ks))
    }

    pub fn full(k_min: usize, k_max: usize) -> Result<Self> {
        KGrid::new((k_min..=k_max).collect())
    }

    /// Every k when the range holds at most [`FULL_GRID_LIMIT`] values;
    /// otherwise the first 100 k's and then ~300 geometrically spaced ones
    /// up to `k_max`.
    pub fn auto(k_min: usize, k_max: usize) -> Result<Self> {
        if k_max < k_min || k_max - k_min < FULL_GRID_LIMIT {
            return KGrid::full(k_min, k_max);
        }
        let dense_end = k_min + DENSE_PREFIX - 1;
        let mut ks: Vec<usize> = (k_min..=dense_end).collect();
        let (lo, hi) = (dense_end as f64, k_max as f64);
        let ratio = (hi / lo).powf(1.0 / GEOMETRIC_POINTS as f64);
        for i in 1..=GEOMETRIC_POINTS {
            let k = (lo * ratio.powi(i as i32)).round() as usize;
            ks.push(k.clamp(dense_end + 1, k_max));
        }
        ks.push(k_max);
        KGrid::new(ks)
    }

    pub fn from_spec(spec: GridSpec, k_min: usize, k_max: usize) -> Result<Self> {
        match spec {
            GridSpec::Full => KGrid::full(k_min, k_max),
            GridSpec::Auto => KGrid::auto(k_min, k_max),
        }
    }

    pub fn ks(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn check_within(&self, lo: usize, hi: usize) -> Result<()> {
        if self.first() < lo || self.last() > hi {
            return Err(Error::invalid(format!(
                "grid spans [{}, {}] but must lie within [{lo}, {hi}]",
                self.first(),
                self.last()
            )));
        }
        Ok(())
    }
}

/// Trapezoid integral of `(x, y)` points divided by the x-range, i.e. the
/// mean height of the piecewise-linear curve. Points must have strictly
/// increasing x.
pub fn normalized_area(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::invalid(format!(
            "an area needs at least 2 curve points, got {}",
            points.len()
        )));
    }
    let mut total = 0.0;
    for w in points.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if x1 <= x0 {
            return Err(Error::invalid(format!(
                "curve x values must be strictly increasing ({x0} then {x1})"
            )));
        }
        total += 0.5 * (y0 + y1) * (x1 - x0);
    }
    let span = points[points.len() - 1].0 - points[0].0;
    Ok(total / span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_is_full_for_small_ranges() {
        let g = KGrid::auto(1, 2000).unwrap();
        assert_eq!(g.len(), 2000);
        assert_eq!(KGrid::auto(1, 10).unwrap(), KGrid::full(1, 10).unwrap());
    }

    #[test]
    fn auto_mixed_grid_for_large_ranges() {
        let g = KGrid::auto(1, 10_000).unwrap();
        assert_eq!(&g.ks()[..100], (1..=100).collect::<Vec<_>>().as_slice());
        assert_eq!(g.last(), 10_000);
        assert!(g.ks().windows(2).all(|w| w[0] < w[1]));
        assert!((350..=420).contains(&g.len()), "{} points", g.len());
    }

    #[test]
    fn grid_validation() {
        assert!(KGrid::new(vec![3]).is_err());
        assert!(KGrid::new(vec![0, 2]).is_err());
        assert_eq!(KGrid::new(vec![5, 2, 5]).unwrap().ks(), [2, 5]);
        assert!(KGrid::full(2, 2).is_err());
    }

    #[test]
    fn area_of_constant_and_ramp() {
        let c: Vec<_> = (1..=7).map(|k| (k as f64, 0.3)).collect();
        assert!((normalized_area(&c).unwrap() - 0.3).abs() < 1e-15);
        assert!(normalized_area(&c[..1]).is_err());
        assert!(normalized_area(&[(1.0, 0.0), (1.0, 1.0)]).is_err());
    }
}
