use std::collections::BTreeSet;

use super::tree::{Label, RootedTree};
use super::PhyloError;

pub const MAX_ENUMERATION_LABELS: usize = 8;

/// Internal clusters (as leaf bitmasks, root included) of every rooted
/// binary tree on leaves `0..n`, canonically sorted.
pub(crate) fn cluster_sets(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    match n {
        0 => {}
        1 => out.push(Vec::new()),
        _ => insert_leaf(2, n, vec![0b11], &mut out),
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn insert_leaf(i: usize, n: usize, clusters: Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i == n {
        out.push(clusters);
        return;
    }
    let x = 1u32 << i;
    let below: Vec<u32> = clusters.iter().copied().chain((0..i).map(|j| 1u32 << j)).collect();
    for s in below {
        let mut next: Vec<u32> = clusters.iter().map(|&c| if c & s == s && c != s { c | x } else { c }).collect();
        next.push(s | x);
        insert_leaf(i + 1, n, next, out);
    }
}

/// All `(2n−3)!!` rooted binary trees on `labels`, canonically ordered.
pub fn enumerate_trees(labels: &BTreeSet<Label>) -> Result<Vec<RootedTree>, PhyloError> {
    if labels.is_empty() {
        return Err(PhyloError::Empty);
    }
    if labels.len() > MAX_ENUMERATION_LABELS {
        return Err(PhyloError::TooManyLabels { max: MAX_ENUMERATION_LABELS, got: labels.len() });
    }
    let names: Vec<&Label> = labels.iter().collect();
    Ok(cluster_sets(labels.len())
        .into_iter()
        .map(|cl| {
            let sets: Vec<BTreeSet<Label>> = cl
                .iter()
                .map(|&c| (0..names.len()).filter(|&i| c >> i & 1 == 1).map(|i| names[i].clone()).collect())
                .collect();
            RootedTree::from_clusters(labels, &sets).expect("enumerated clusters form a binary tree")
        })
        .collect())
}

/// All caterpillars on `labels` (`n!/2` of them for `n ≥ 2`).
pub fn enumerate_caterpillars(labels: &BTreeSet<Label>) -> Result<Vec<RootedTree>, PhyloError> {
    Ok(enumerate_trees(labels)?.into_iter().filter(|t| t.num_leaves() < 2 || t.is_caterpillar()).collect())
}

/// Dense numbering of the `3·C(n,3)` triplets on leaves `0..n`: for the
/// 3-set `x<y<z` with rank `s`, `3s` is `xy|z`, `3s+1` is `xz|y` and `3s+2`
/// is `yz|x`.
#[derive(Debug, Clone)]
pub(crate) struct TripletIndex {
    n: usize,
    rank: Vec<usize>,
}

impl TripletIndex {
    pub(crate) fn new(n: usize) -> Self {
        let mut rank = vec![usize::MAX; n * n * n];
        let mut r = 0;
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    rank[(x * n + y) * n + z] = r;
                    r += 1;
                }
            }
        }
        TripletIndex { n, rank }
    }

    pub(crate) fn len(&self) -> usize {
        let n = self.n;
        if n < 3 {
            0
        } else {
            n * (n - 1) * (n - 2) / 2
        }
    }

    /// Index of `ab|c`.
    pub(crate) fn index(&self, a: usize, b: usize, c: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let mut s = [a, b, c];
        s.sort_unstable();
        let r = self.rank[(s[0] * self.n + s[1]) * self.n + s[2]];
        let o = if c == s[2] {
            0
        } else if c == s[1] {
            1
        } else {
            2
        };
        3 * r + o
    }

    /// `(a, b, c)` with `a < b` for a dense index.
    pub(crate) fn decode(&self, idx: usize) -> (usize, usize, usize) {
        let r = idx / 3;
        let n = self.n;
        let pos = self.rank.iter().position(|&x| x == r).expect("valid index");
        let (x, y, z) = (pos / (n * n), pos / n % n, pos % n);
        match idx % 3 {
            0 => (x, y, z),
            1 => (x, z, y),
            _ => (y, z, x),
        }
    }

    /// Displayed-triplet bitset of a tree given by its internal clusters.
    pub(crate) fn mask(&self, clusters: &[u32]) -> Vec<u64> {
        let mut out = vec![0u64; self.len().div_ceil(64)];
        let n = self.n;
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    for (a, b, c) in [(x, y, z), (x, z, y), (y, z, x)] {
                        let ab = 1u32 << a | 1u32 << b;
                        if clusters.iter().any(|&k| k & ab == ab && k >> c & 1 == 0) {
                            let i = self.index(a, b, c);
                            out[i / 64] |= 1 << (i % 64);
                        }
                    }
                }
            }
        }
        out
    }
}
