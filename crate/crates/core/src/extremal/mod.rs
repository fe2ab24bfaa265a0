//! Covering the full triplet set with few trees: exact τ(n) and τ_c(n), the
//! greedy caterpillar bound, and missing triplets for rootings of one
//! unrooted tree.

mod greedy;
mod tau;
mod unrooted;

use thiserror::Error;

use crate::phylo::{Label, PhyloError, Triplet, TripletSet};

pub use greedy::{greedy_caterpillar_cover, greedy_caterpillar_rounds, GreedyRound};
pub use tau::{tau, tau_decision, tree_shapes, CoverModel, Decision, TauDecision, TauValue};
pub use unrooted::{
    find_missing_triplet, missing_triplet_brute, missing_triplet_constructive, rootings_of, MissingTriplet, MissingVia,
    Rooting, UnrootedTree,
};

#[derive(Debug, Error)]
pub enum ExtremalError {
    #[error("need at least 3 leaves, got {0}")]
    TooFewLeaves(usize),
    #[error("slot assignment is not a tree")]
    Inconsistent,
    #[error("{0} is not an edge of the tree")]
    NotAnEdge(String),
    #[error(transparent)]
    Phylo(#[from] PhyloError),
}

/// Positions of the triplets over `1..=n`: leaf triples in lexicographic
/// order, and per triple `xy|z`, `xz|y`, `yz|x` for `x < y < z`.
#[derive(Debug, Clone)]
pub struct FullIndex {
    n: usize,
    rank: Vec<usize>,
    triples: Vec<[usize; 3]>,
}

impl FullIndex {
    pub fn new(n: usize) -> Result<Self, ExtremalError> {
        if n < 3 {
            return Err(ExtremalError::TooFewLeaves(n));
        }
        let mut triples = Vec::new();
        let mut rank = vec![usize::MAX; (n + 1).pow(3)];
        for x in 1..=n {
            for y in x + 1..=n {
                for z in y + 1..=n {
                    rank[(x * (n + 1) + y) * (n + 1) + z] = triples.len();
                    triples.push([x, y, z]);
                }
            }
        }
        Ok(FullIndex { n, rank, triples })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn triples(&self) -> usize {
        self.triples.len()
    }

    pub fn len(&self) -> usize {
        3 * self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Position of `ab|c`.
    pub fn var(&self, a: usize, b: usize, c: usize) -> usize {
        let mut s = [a, b, c];
        s.sort_unstable();
        let r = self.rank[(s[0] * (self.n + 1) + s[1]) * (self.n + 1) + s[2]];
        let o = 2 - s.iter().position(|&x| x == c).expect("witness in triple");
        3 * r + o
    }

    pub fn triplet(&self, i: usize) -> Triplet {
        let [x, y, z] = self.triples[i / 3];
        let (a, b, c) = match i % 3 {
            0 => (x, y, z),
            1 => (x, z, y),
            _ => (y, z, x),
        };
        Triplet::new(Label::from(a), Label::from(b), Label::from(c)).expect("distinct")
    }
}

/// All `3 * C(n, 3)` triplets over `1..=n`.
pub fn full_triplet_set(n: usize) -> Result<TripletSet, ExtremalError> {
    let idx = FullIndex::new(n)?;
    Ok((0..idx.len()).map(|i| idx.triplet(i)).collect())
}

/// `⌈log_{3/2}(n(n-1)(n-2)/2)⌉`, computed exactly as the least `m` with
/// `3^m >= 2^m * n(n-1)(n-2)/2`.
pub fn log_upper_bound(n: usize) -> Result<usize, ExtremalError> {
    if n < 3 {
        return Err(ExtremalError::TooFewLeaves(n));
    }
    let size = (n * (n - 1) * (n - 2) / 2) as u128;
    let (mut three, mut two) = (1u128, 1u128);
    let mut m = 0;
    while three < two * size {
        three *= 3;
        two *= 2;
        m += 1;
    }
    Ok(m)
}
