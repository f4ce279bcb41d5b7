use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// One agglomeration step. Ids below the leaf count are samples; merge `i`
/// creates cluster `n + i`. `left < right` always.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Full binary merge tree over `n` leaves, merges in nondecreasing height.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    leaves: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Validates the merge list: `n - 1` merges, children formed before use
    /// and consumed once, consistent sizes, finite nondecreasing heights.
    pub fn from_merges(leaves: usize, merges: Vec<Merge>) -> Result<Self> {
        if leaves < 2 {
            return Err(Error::invalid("a dendrogram needs at least 2 leaves"));
        }
        if merges.len() != leaves - 1 {
            return Err(Error::invalid(format!(
                "{leaves} leaves need {} merges, got {}",
                leaves - 1,
                merges.len()
            )));
        }
        let mut size = vec![1usize; 2 * leaves - 1];
        let mut used = vec![false; 2 * leaves - 1];
        let mut prev = 0.0f64;
        for (i, m) in merges.iter().enumerate() {
            let id = leaves + i;
            if m.left >= m.right || m.right >= id {
                return Err(Error::invalid(format!(
                    "merge {i} joins ({}, {}) which is not an ordered pair of existing clusters",
                    m.left, m.right
                )));
            }
            for c in [m.left, m.right] {
                if std::mem::replace(&mut used[c], true) {
                    return Err(Error::invalid(format!("cluster {c} merged twice")));
                }
            }
            if !m.height.is_finite() || m.height < 0.0 || m.height < prev {
                return Err(Error::invalid(format!(
                    "merge {i} height {} breaks the nondecreasing order",
                    m.height
                )));
            }
            prev = m.height;
            size[id] = size[m.left] + size[m.right];
            if size[id] != m.size {
                return Err(Error::invalid(format!(
                    "merge {i} declares size {} but its children hold {}",
                    m.size, size[id]
                )));
            }
        }
        Ok(Dendrogram { leaves, merges })
    }

    pub(crate) fn from_parts_unchecked(leaves: usize, merges: Vec<Merge>) -> Self {
        debug_assert!(Dendrogram::from_merges(leaves, merges.clone()).is_ok());
        Dendrogram { leaves, merges }
    }

    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Partition into `k` clusters: the first `n - k` merges applied.
    /// Clusters are numbered by their smallest member row.
    pub fn cut(&self, k: usize) -> Result<Partition> {
        let n = self.leaves;
        if k == 0 || k > n {
            return Err(Error::invalid(format!("cluster count {k} outside [1, {n}]")));
        }
        let mut parent: Vec<usize> = (0..2 * n - 1).collect();
        for (i, m) in self.merges[..n - k].iter().enumerate() {
            parent[m.left] = n + i;
            parent[m.right] = n + i;
        }
        let mut root = vec![0usize; n];
        for (leaf, r) in root.iter_mut().enumerate() {
            let mut c = leaf;
            while parent[c] != c {
                c = parent[c];
            }
            // path compression
            let mut x = leaf;
            while parent[x] != c {
                let next = parent[x];
                parent[x] = c;
                x = next;
            }
            *r = c;
        }
        Ok(Partition::from_assignment(root))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "left,right,height,size")?;
        for m in &self.merges {
            writeln!(w, "{},{},{},{}", m.left, m.right, m.height, m.size)?;
        }
        w.flush()
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| Error::Format(e.to_string()))?
            .unwrap_or_default();
        if header.trim_end() != "left,right,height,size" {
            return Err(Error::Parse {
                line: 1,
                message: format!("bad dendrogram header `{header}`"),
            });
        }
        let mut merges = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse {
                line: i + 2,
                message: format!("bad {what} in `{line}`"),
            };
            let f: Vec<&str> = line.trim_end().split(',').collect();
            if f.len() != 4 {
                return Err(bad("column count"));
            }
            merges.push(Merge {
                left: f[0].parse().map_err(|_| bad("left id"))?,
                right: f[1].parse().map_err(|_| bad("right id"))?,
                height: f[2].parse().map_err(|_| bad("height"))?,
                size: f[3].parse().map_err(|_| bad("size"))?,
            });
        }
        Dendrogram::from_merges(merges.len() + 1, merges)
    }
}

/// Flat clustering: `assignment[i]` is the cluster of sample `i`, in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Relabels arbitrary cluster tags so clusters are numbered in order of
    /// their first (smallest) member row.
    pub fn from_assignment<T: Eq + std::hash::Hash + Copy>(tags: impl IntoIterator<Item = T>) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment: Vec<usize> = tags
            .into_iter()
            .map(|t| {
                let next = map.len();
                *map.entry(t).or_insert(next)
            })
            .collect();
        let k = map.len();
        Partition { assignment, k }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Member rows of every cluster, clusters in index order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}
