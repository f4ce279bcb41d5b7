use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{Dendrogram, Merge};
use crate::data::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Upper triangle of a symmetric `n × n` matrix, row-major, diagonal excluded.
struct Condensed {
    n: usize,
    data: Vec<f64>,
}

impl Condensed {
    #[inline]
    fn offset(&self, i: usize) -> usize {
        i * self.n - i * (i + 1) / 2
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.offset(i) + (j - i - 1)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Squared Euclidean distances, rows filled in parallel.
    fn squared_euclidean(m: &EmbeddingMatrix) -> Self {
        let n = m.rows();
        let points: Vec<Vec<f64>> = m
            .iter_rows()
            .map(|r| r.iter().map(|&v| f64::from(v)).collect())
            .collect();
        let mut data = vec![0f64; n * (n - 1) / 2];
        let mut segments = Vec::with_capacity(n);
        let mut rest = data.as_mut_slice();
        for i in 0..n {
            let (seg, tail) = rest.split_at_mut(n - 1 - i);
            segments.push(seg);
            rest = tail;
        }
        segments.into_par_iter().enumerate().for_each(|(i, seg)| {
            let xi = &points[i];
            for (slot, xj) in seg.iter_mut().zip(&points[i + 1..]) {
                *slot = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
            }
        });
        Condensed { n, data }
    }
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Leaf(usize),
    Merged(usize),
}

struct RawMerge {
    a: Node,
    b: Node,
    cost: f64,
    size: usize,
}

/// Ward-linkage dendrogram of the matrix rows.
///
/// Nearest-neighbor chain over a materialized squared-distance matrix with
/// Lance–Williams updates: O(n²) time and memory. Merge cost between clusters
/// A and B is `2·|A||B|/(|A|+|B|) · ‖c_A − c_B‖²`; reported heights are its
/// square root, so two singletons merge at their Euclidean distance.
///
/// Among merges of equal cost the pair with the lexicographically smallest
/// `(min id, max id)` goes first. The chain cannot honor that rule once
/// exact ties appear, so a tied run is redone with a global-minimum search
/// that can.
pub fn ward_linkage(matrix: &EmbeddingMatrix) -> Result<Dendrogram> {
    let n = matrix.rows();
    if n < 2 {
        return Err(Error::invalid(format!(
            "clustering needs at least 2 rows, got {n}"
        )));
    }
    if let Some(pos) = matrix.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: pos / matrix.dim(),
        });
    }

    let mut dist = Condensed::squared_euclidean(matrix);
    let (raw, mut tied) = nn_chain(&mut dist);
    let mut costs: Vec<f64> = raw.iter().map(|r| r.cost).collect();
    costs.sort_by(f64::total_cmp);
    tied |= costs.windows(2).any(|w| w[0] == w[1]);
    if !tied {
        return Ok(Dendrogram::from_parts_unchecked(n, order_merges(n, raw)));
    }
    log::debug!("exact ties among {n} rows; using global-minimum search");
    let dist = Condensed::squared_euclidean(matrix);
    Ok(Dendrogram::from_parts_unchecked(n, generic(matrix, dist)))
}

/// Returns the chain-order merges and whether any nearest-neighbor search
/// or merge cost was tied.
fn nn_chain(dist: &mut Condensed) -> (Vec<RawMerge>, bool) {
    let n = dist.n;
    let mut alive: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut node: Vec<Node> = (0..n).map(Node::Leaf).collect();
    // provisional id used for tie-breaking: leaves first, then merges in
    // creation order
    let mut tag: Vec<usize> = (0..n).collect();
    // cost at which the cluster in each slot was formed
    let mut level = vec![0f64; n];
    let mut chain: Vec<usize> = Vec::with_capacity(n);
    let mut raw = Vec::with_capacity(n - 1);
    let mut tied = false;

    while alive.len() > 1 {
        if chain.is_empty() {
            let start = *alive.iter().min_by_key(|&&x| tag[x]).unwrap();
            chain.push(start);
        }
        loop {
            let a = chain[chain.len() - 1];
            let prev = chain.len().checked_sub(2).map(|i| chain[i]);
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for &x in &alive {
                if x == a {
                    continue;
                }
                let d = dist.get(a, x);
                tied |= d == best_d;
                // the predecessor wins ties, otherwise the smallest tag
                let wins_tie = d == best_d
                    && (Some(x) == prev || (Some(best) != prev && tag[x] < tag[best]));
                if d < best_d || wins_tie {
                    best = x;
                    best_d = d;
                }
            }
            if Some(best) == prev {
                break;
            }
            chain.push(best);
        }

        let b = chain.pop().unwrap();
        let a = chain.pop().unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let d_ab = dist.get(lo, hi);
        let (s_lo, s_hi) = (size[lo] as f64, size[hi] as f64);
        for &x in &alive {
            if x == lo || x == hi {
                continue;
            }
            let s_x = size[x] as f64;
            let updated = ((s_x + s_lo) * dist.get(x, lo) + (s_x + s_hi) * dist.get(x, hi)
                - s_x * d_ab)
                / (s_lo + s_hi + s_x);
            dist.set(x, hi, updated.max(0.0));
        }

        // Reducibility guarantees parents cost at least as much as children;
        // the max only absorbs rounding.
        let cost = d_ab.max(level[lo]).max(level[hi]);
        raw.push(RawMerge {
            a: node[lo],
            b: node[hi],
            cost,
            size: size[lo] + size[hi],
        });
        node[hi] = Node::Merged(raw.len() - 1);
        size[hi] += size[lo];
        level[hi] = cost;
        tag[hi] = n + raw.len() - 1;
        let pos = alive.binary_search(&lo).expect("merged slot is alive");
        alive.remove(pos);
    }
    (raw, tied)
}

/// Cost of merging clusters with coordinate sums `sa`, `sb` and sizes
/// `na`, `nb`. Written over sums so integer data rounds once, at the final
/// division, and exactly tied costs compare equal.
fn merge_cost(sa: &[f64], na: f64, sb: &[f64], nb: f64) -> f64 {
    let sq: f64 = sa
        .iter()
        .zip(sb)
        .map(|(x, y)| {
            let t = nb * x - na * y;
            t * t
        })
        .sum();
    2.0 * sq / (na * nb * (na + nb))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    cost: f64,
    lo: usize,
    hi: usize,
}

impl Key {
    const NONE: Key = Key {
        cost: f64::INFINITY,
        lo: usize::MAX,
        hi: usize::MAX,
    };

    fn order(&self, other: &Key) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.lo.cmp(&other.lo))
            .then(self.hi.cmp(&other.hi))
    }
}

/// Min-heap entry.
#[derive(PartialEq)]
struct Entry(Key, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.order(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Global-minimum agglomeration: every row of the cost matrix keeps its
/// best partner among later slots, a heap orders the rows, and each step
/// takes the smallest `(cost, min id, max id)` overall. Costs are
/// recomputed from cluster sums rather than by Lance–Williams.
fn generic(matrix: &EmbeddingMatrix, mut cost: Condensed) -> Vec<Merge> {
    let n = cost.n;
    let mut sums: Vec<Vec<f64>> = matrix
        .iter_rows()
        .map(|r| r.iter().map(|&v| f64::from(v)).collect())
        .collect();
    let mut size = vec![1usize; n];
    let mut id: Vec<usize> = (0..n).collect();
    let mut active = vec![true; n];
    let mut nn = vec![usize::MAX; n];
    let mut best = vec![Key::NONE; n];
    let mut heap = BinaryHeap::with_capacity(2 * n);

    let pair = |cost: &Condensed, id: &[usize], i: usize, j: usize| Key {
        cost: cost.get(i, j),
        lo: id[i].min(id[j]),
        hi: id[i].max(id[j]),
    };
    let rescan = |i: usize,
                  cost: &Condensed,
                  id: &[usize],
                  active: &[bool],
                  nn: &mut [usize],
                  best: &mut [Key],
                  heap: &mut BinaryHeap<Entry>| {
        let (mut k, mut arg) = (Key::NONE, usize::MAX);
        for j in i + 1..n {
            if active[j] {
                let c = pair(cost, id, i, j);
                if c.order(&k) == Ordering::Less {
                    k = c;
                    arg = j;
                }
            }
        }
        nn[i] = arg;
        best[i] = k;
        if arg != usize::MAX {
            heap.push(Entry(k, i));
        }
    };

    for i in 0..n - 1 {
        rescan(i, &cost, &id, &active, &mut nn, &mut best, &mut heap);
    }

    let mut merges = Vec::with_capacity(n - 1);
    let mut level = 0f64;
    while merges.len() < n - 1 {
        let Entry(key, a) = heap.pop().expect("a live row remains");
        if !active[a] || key != best[a] {
            continue;
        }
        let b = nn[a];
        if !active[b] || pair(&cost, &id, a, b) != key {
            rescan(a, &cost, &id, &active, &mut nn, &mut best, &mut heap);
            continue;
        }

        level = level.max(key.cost.max(0.0).sqrt());
        merges.push(Merge {
            left: key.lo,
            right: key.hi,
            height: level,
            size: size[a] + size[b],
        });
        let moved = std::mem::take(&mut sums[a]);
        sums[b].iter_mut().zip(&moved).for_each(|(s, v)| *s += v);
        size[b] += size[a];
        id[b] = n + merges.len() - 1;
        active[a] = false;

        let nb = size[b] as f64;
        for x in 0..n {
            if active[x] && x != b {
                let c = merge_cost(&sums[x], size[x] as f64, &sums[b], nb);
                cost.set(x, b, c);
            }
        }
        for x in 0..b {
            if !active[x] {
                continue;
            }
            if nn[x] == a || nn[x] == b {
                rescan(x, &cost, &id, &active, &mut nn, &mut best, &mut heap);
            } else {
                let c = pair(&cost, &id, x, b);
                if c.order(&best[x]) == Ordering::Less {
                    nn[x] = b;
                    best[x] = c;
                    heap.push(Entry(c, x));
                }
            }
        }
        rescan(b, &cost, &id, &active, &mut nn, &mut best, &mut heap);
    }
    merges
}

/// Sorts chain-order merges by cost and assigns dendrogram ids. Equal-cost
/// merges are emitted smallest `(min id, max id)` first among those whose
/// children already exist.
fn order_merges(n: usize, raw: Vec<RawMerge>) -> Vec<Merge> {
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&x, &y| raw[x].cost.total_cmp(&raw[y].cost));

    let mut emitted: Vec<Option<usize>> = vec![None; raw.len()];
    let mut merges = Vec::with_capacity(raw.len());
    let id_of = |node: Node, emitted: &[Option<usize>]| match node {
        Node::Leaf(i) => Some(i),
        Node::Merged(j) => emitted[j],
    };

    let mut start = 0;
    while start < order.len() {
        let cost = raw[order[start]].cost;
        let mut end = start;
        while end < order.len() && raw[order[end]].cost == cost {
            end += 1;
        }
        let mut pending: Vec<usize> = order[start..end].to_vec();
        while !pending.is_empty() {
            let mut pick: Option<(usize, (usize, usize))> = None;
            for (slot, &r) in pending.iter().enumerate() {
                let (Some(x), Some(y)) = (id_of(raw[r].a, &emitted), id_of(raw[r].b, &emitted))
                else {
                    continue;
                };
                let key = (x.min(y), x.max(y));
                if pick.is_none_or(|(_, k)| key < k) {
                    pick = Some((slot, key));
                }
            }
            let (slot, (left, right)) = pick.expect("a merge in every cost group is ready");
            let r = pending.remove(slot);
            emitted[r] = Some(n + merges.len());
            merges.push(Merge {
                left,
                right,
                height: raw[r].cost.max(0.0).sqrt(),
                size: raw[r].size,
            });
        }
        start = end;
    }
    merges
}
