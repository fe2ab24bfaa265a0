//! Exact solvers, reductions and uniqueness gadgets for ternary permutation
//! CSPs over `k` linear orders, and for rooted-triplet compatibility over `k`
//! phylogenetic trees.

pub mod extremal;
pub mod gadgets;
pub mod orderings;
pub mod phylo;
pub mod reductions;
pub mod sat;
pub mod solver;
