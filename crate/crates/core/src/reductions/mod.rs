//! Polynomial-time reductions between the ordering and phylogenetic problems,
//! with the solution maps that witness equisatisfiability.
//!
//! Every gadget element gets a namespaced identifier `g:<reduction>:<index>:<role>`
//! so that reductions compose without collisions.

pub mod csp;
pub mod digraph;
pub mod phylo;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::gadgets::GadgetError;
use crate::orderings::OrderingError;
use crate::phylo::PhyloError;

pub use csp::{
    back_1pi5_to_2pi0, back_1pi5_to_2pi5, back_1pi5_to_2pi9, back_1pi9_to_2pi4, back_2pi0_to_2pi1, back_2pi1_to_2pi6,
    lift_1pi5_to_2pi0, lift_1pi5_to_2pi5, lift_1pi5_to_2pi9, lift_1pi9_to_2pi4, lift_2pi0_to_2pi1, lift_2pi1_to_2pi6,
    reduce_1pi5_to_2pi0, reduce_1pi5_to_2pi5, reduce_1pi5_to_2pi9, reduce_1pi9_to_2pi4, reduce_2pi0_to_2pi1,
    reduce_2pi1_to_2pi6, CspReduction,
};
pub use digraph::{
    back_dichromatic_to_outdeg3, back_outdeg3_to_2cat, lift_dichromatic_to_outdeg3, lift_outdeg3_to_2cat,
    reduce_dichromatic_to_outdeg3, reduce_outdeg3_to_2cat, DigraphReduction, TwoCatReduction,
};
pub use phylo::{
    back_2cat_to_3cat, back_2cat_to_3tree, core_triple, flatten_to_caterpillar, lift_2cat_to_3cat, reduce_2cat_to_3cat,
    reduce_2cat_to_3tree, PhyloReduction,
};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("expected a {expected} instance, got {got}")]
    WrongSource { expected: String, got: String },
    #[error("identifier {0} is reserved for gadget elements")]
    Collision(String),
    #[error("out-degree of {vertex} is {degree}, at most 3 allowed")]
    OutDegree { vertex: String, degree: usize },
    #[error("solution does not satisfy the source instance")]
    NotASolution,
    #[error("target solution does not have the expected gadget structure: {0}")]
    Structure(String),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Phylo(#[from] PhyloError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

pub(crate) fn fresh(reduction: &str, index: impl fmt::Display, role: &str) -> String {
    format!("g:{reduction}:{index}:{role}")
}

/// Named block sizes of a transformed instance, in construction order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Parts(pub Vec<(String, usize)>);

impl Parts {
    pub fn push(&mut self, name: &str, n: usize) {
        self.0.push((name.to_string(), n));
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.0.iter().find(|(n, _)| n == name).map(|&(_, c)| c)
    }

    pub fn as_map(&self) -> BTreeMap<String, usize> {
        self.0.iter().cloned().collect()
    }
}

/// The registered reductions, by their command-line names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReductionKind {
    Pi5ToPi0,
    Pi0ToPi1,
    Pi9ToPi4,
    Pi5ToPi5,
    Pi1ToPi6,
    Pi5ToPi9,
    CatToThreeCat,
    CatToThreeTree,
    DichromaticToOutdeg3,
    Outdeg3ToTwoCat,
}

/// What a reduction reads or writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Csp,
    Triplets,
    Digraph,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 10] = [
        ReductionKind::Pi5ToPi0,
        ReductionKind::Pi0ToPi1,
        ReductionKind::Pi9ToPi4,
        ReductionKind::Pi5ToPi5,
        ReductionKind::Pi1ToPi6,
        ReductionKind::Pi5ToPi9,
        ReductionKind::CatToThreeCat,
        ReductionKind::CatToThreeTree,
        ReductionKind::DichromaticToOutdeg3,
        ReductionKind::Outdeg3ToTwoCat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::Pi5ToPi0 => "1pi5-to-2pi0",
            ReductionKind::Pi0ToPi1 => "2pi0-to-2pi1",
            ReductionKind::Pi9ToPi4 => "1pi9-to-2pi4",
            ReductionKind::Pi5ToPi5 => "1pi5-to-2pi5",
            ReductionKind::Pi1ToPi6 => "2pi1-to-2pi6",
            ReductionKind::Pi5ToPi9 => "1pi5-to-2pi9",
            ReductionKind::CatToThreeCat => "2cat-to-3cat",
            ReductionKind::CatToThreeTree => "2cat-to-3tree",
            ReductionKind::DichromaticToOutdeg3 => "dichromatic-to-outdeg3",
            ReductionKind::Outdeg3ToTwoCat => "outdeg3-to-2cat",
        }
    }

    pub fn source(self) -> ProblemKind {
        match self {
            ReductionKind::CatToThreeCat | ReductionKind::CatToThreeTree => ProblemKind::Triplets,
            ReductionKind::DichromaticToOutdeg3 | ReductionKind::Outdeg3ToTwoCat => ProblemKind::Digraph,
            _ => ProblemKind::Csp,
        }
    }

    pub fn target(self) -> ProblemKind {
        match self {
            ReductionKind::CatToThreeCat | ReductionKind::CatToThreeTree | ReductionKind::Outdeg3ToTwoCat => {
                ProblemKind::Triplets
            }
            ReductionKind::DichromaticToOutdeg3 => ProblemKind::Digraph,
            _ => ProblemKind::Csp,
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReductionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReductionKind::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ReductionKind::ALL.iter().map(|r| r.name()).collect();
            format!("unknown reduction {s:?}; expected one of {}", names.join(", "))
        })
    }
}
