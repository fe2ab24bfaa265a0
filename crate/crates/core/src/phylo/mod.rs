//! Rooted binary phylogenetic trees, rooted triplets, BUILD, the
//! caterpillar/ordering correspondence, triplet digraphs and exact
//! `k`-tree compatibility.

mod build;
mod compat;
mod digraph;
pub(crate) mod enumerate;
mod tree;
mod triplet;

use thiserror::Error;

pub use build::{aho_build, caterpillar_compatible, caterpillar_of, ordering_of, triplet_digraph};
pub use compat::{
    is_dicoloring, k_tree_compatible, k_tree_compatible_with, two_dicolorable, two_dicolorable_with, CompatOutcome,
    CompatReport,
};
pub use digraph::Digraph;
pub use enumerate::{enumerate_caterpillars, enumerate_trees, MAX_ENUMERATION_LABELS};
pub use tree::{labels, Label, NodeId, RootedTree};
pub use triplet::{Triplet, TripletSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhyloError {
    #[error("invalid label {0:?}")]
    BadLabel(String),
    #[error("label {0} occurs twice")]
    DuplicateLabel(String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("triplet {0} repeats a label")]
    RepeatedLabel(String),
    #[error("cannot parse triplet {0:?}")]
    TripletSyntax(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("empty label set")]
    Empty,
    #[error("tree is not binary")]
    NotBinary,
    #[error("tree is not a caterpillar")]
    NotCaterpillar,
    #[error("newick: {0}")]
    Newick(String),
    #[error("dot: {0}")]
    Dot(String),
    #[error("self-loop at {0}")]
    SelfLoop(String),
    #[error("enumeration supports at most {max} labels, got {got}")]
    TooManyLabels { max: usize, got: usize },
    #[error("search budget of {0} nodes exceeded")]
    Budget(u64),
    #[error("{0}")]
    Precondition(String),
}
