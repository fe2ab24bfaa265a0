//! Uniqueness gadgets: small instances whose constraint sets pin down their
//! generating orderings (or trees), and exhaustive verification of that.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::orderings::{implied_constraints, pi_family, Instance, LinearOrdering, OrderingError, PiFamily};
use crate::phylo::enumerate::{cluster_sets, TripletIndex};
use crate::phylo::{Label, PhyloError, RootedTree};
use crate::solver::{enumerate_solutions, Mode, Solution, SolverConfig, SolverError};

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("generators must share one domain")]
    DomainMismatch,
    #[error("k = {k} but {gens} generators were given")]
    Arity { k: usize, gens: usize },
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Phylo(#[from] PhyloError),
    #[error("trees must be on the six leaves 0..5")]
    NotSixLeaves,
    #[error("no qualifying caterpillar triple exists among {0} candidates")]
    NoTriple(usize),
}

/// Which solutions are identified with each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetrySpec {
    None,
    /// Each member may be replaced by its reversal.
    PerOrderReversal,
    /// Each member may swap its last two positions (the caterpillar cherry).
    SwapLastTwo,
}

impl SymmetrySpec {
    pub fn description(self) -> &'static str {
        match self {
            SymmetrySpec::None => "solutions compared as multisets of orderings",
            SymmetrySpec::PerOrderReversal => "each ordering identified with its reversal",
            SymmetrySpec::SwapLastTwo => "each ordering identified with the one swapping its last two elements",
        }
    }

    fn images(self, o: &LinearOrdering) -> Vec<LinearOrdering> {
        match self {
            SymmetrySpec::None => vec![o.clone()],
            SymmetrySpec::PerOrderReversal => vec![o.clone(), o.reversal()],
            SymmetrySpec::SwapLastTwo => {
                let mut s = o.as_slice().to_vec();
                let n = s.len();
                if n >= 2 {
                    s.swap(n - 1, n - 2);
                }
                vec![o.clone(), LinearOrdering::new(s).expect("permutation")]
            }
        }
    }

    fn canonical_member(self, o: &LinearOrdering) -> LinearOrdering {
        self.images(o).into_iter().min().expect("non-empty")
    }

    /// Representative of a solution's class.
    pub fn canonical(self, s: &Solution) -> Solution {
        Solution::new(s.orderings().iter().map(|o| self.canonical_member(o)).collect())
    }

    /// Every solution in the class of `s`.
    pub fn closure(self, s: &Solution) -> Vec<Solution> {
        let mut acc: Vec<Vec<LinearOrdering>> = vec![Vec::new()];
        for o in s.orderings() {
            let imgs = self.images(o);
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    imgs.iter().map(move |i| {
                        let mut p = prefix.clone();
                        p.push(i.clone());
                        p
                    })
                })
                .collect();
        }
        let set: BTreeSet<Solution> = acc.into_iter().map(Solution::new).collect();
        set.into_iter().collect()
    }
}

/// The instance whose constraints are every constraint implied by some
/// generator.
pub fn gadget_instance(generators: &[LinearOrdering<String>], pi: PiFamily, k: usize) -> Result<Instance, GadgetError> {
    if generators.len() != k {
        return Err(GadgetError::Arity { k, gens: generators.len() });
    }
    let first = generators.first().ok_or(GadgetError::Arity { k, gens: 0 })?;
    let names: Vec<String> = first.as_slice().to_vec();
    let domain = first.domain();
    if generators.iter().any(|g| g.domain() != domain) {
        return Err(GadgetError::DomainMismatch);
    }
    let base = Instance::new(names, Vec::new(), pi, k)?;
    let mut cs = Vec::new();
    for g in generators {
        let ids = g.map(|n| base.var(n).expect("same domain"))?;
        cs.extend(implied_constraints(&ids, pi));
    }
    Ok(Instance::new(base.names().to_vec(), cs, pi, k)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct GadgetReport {
    #[serde(skip)]
    pub instance: Instance,
    pub pi: usize,
    pub k: usize,
    pub variables: usize,
    pub constraints: usize,
    pub symmetry: SymmetrySpec,
    /// The generator class: every solution identified with the generators.
    pub expected: Vec<Vec<Vec<String>>>,
    pub found: Vec<Vec<Vec<String>>>,
    pub found_multisets: usize,
    pub found_ordered: u64,
    /// Number of distinct classes among `found`.
    pub classes: usize,
    pub unique: bool,
}

/// Enumerates every solution of the gadget instance and compares it, modulo
/// `sym`, with the generators.
pub fn verify_uniqueness(
    generators: &[LinearOrdering<String>],
    pi: PiFamily,
    k: usize,
    sym: SymmetrySpec,
) -> Result<GadgetReport, GadgetError> {
    let inst = gadget_instance(generators, pi, k)?;
    let mode = if inst.num_vars() <= 8 { Mode::Exhaustive } else { Mode::BranchAndBound };
    let found = enumerate_solutions(&inst, &SolverConfig::enumerate(mode))?;
    let gen_ids: Vec<LinearOrdering> =
        generators.iter().map(|g| g.map(|n| inst.var(n).expect("same domain"))).collect::<Result<_, _>>()?;
    let gen_sol = Solution::new(gen_ids);
    let expected = sym.closure(&gen_sol);
    let classes: BTreeSet<Solution> = found.solutions.iter().map(|s| sym.canonical(s)).collect();
    let unique = classes.len() == 1 && classes.contains(&sym.canonical(&gen_sol));
    let show = |s: &Solution| s.report(&inst).orderings;
    Ok(GadgetReport {
        pi: pi.index(),
        k,
        variables: inst.num_vars(),
        constraints: inst.constraints().len(),
        symmetry: sym,
        expected: expected.iter().map(show).collect(),
        found: found.solutions.iter().map(show).collect(),
        found_multisets: found.solutions.len(),
        found_ordered: found.ordered,
        classes: classes.len(),
        unique,
        instance: inst,
    })
}

/// A named ordering gadget: generators, family, symmetry.
#[derive(Debug, Clone)]
pub struct OrderingGadget {
    pub name: &'static str,
    pub generators: Vec<LinearOrdering<String>>,
    pub pi: PiFamily,
    pub symmetry: SymmetrySpec,
}

impl OrderingGadget {
    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn instance(&self) -> Instance {
        gadget_instance(&self.generators, self.pi, self.k()).expect("built-in gadget is well formed")
    }

    pub fn verify(&self) -> Result<GadgetReport, GadgetError> {
        verify_uniqueness(&self.generators, self.pi, self.k(), self.symmetry)
    }
}

pub fn named_ordering(xs: &[&str]) -> LinearOrdering<String> {
    LinearOrdering::new(xs.iter().map(|s| s.to_string()).collect()).expect("distinct names")
}

/// Betweenness gadget on 1..5.
pub fn pi5_gadget() -> OrderingGadget {
    OrderingGadget {
        name: "pi5",
        generators: vec![named_ordering(&["1", "2", "3", "4", "5"]), named_ordering(&["5", "2", "3", "4", "1"])],
        pi: pi_family(5).expect("valid index"),
        symmetry: SymmetrySpec::PerOrderReversal,
    }
}

/// Π6 gadget on 1..4; unique with no symmetry.
pub fn pi6_gadget() -> OrderingGadget {
    OrderingGadget {
        name: "pi6",
        generators: vec![named_ordering(&["1", "2", "3", "4"]), named_ordering(&["2", "4", "1", "3"])],
        pi: pi_family(6).expect("valid index"),
        symmetry: SymmetrySpec::None,
    }
}

/// Non-betweenness gadget on 1..7.
pub fn pi9_gadget() -> OrderingGadget {
    OrderingGadget {
        name: "pi9",
        generators: vec![
            named_ordering(&["1", "2", "3", "4", "5", "6", "7"]),
            named_ordering(&["2", "5", "7", "3", "1", "6", "4"]),
        ],
        pi: pi_family(9).expect("valid index"),
        symmetry: SymmetrySpec::PerOrderReversal,
    }
}

pub fn ordering_gadget(name: &str) -> Option<OrderingGadget> {
    match name {
        "pi5" => Some(pi5_gadget()),
        "pi6" => Some(pi6_gadget()),
        "pi9" => Some(pi9_gadget()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Six-leaf tree triple

const SIX: usize = 6;

/// Bit `3s` set for every 3-set rank `s`.
const fn group_base() -> u64 {
    let mut m = 0u64;
    let mut s = 0;
    while s < 20 {
        m |= 1 << (3 * s);
        s += 1;
    }
    m
}

const G0: u64 = group_base();

fn has_full_group(m: u64) -> bool {
    m & (m >> 1) & (m >> 2) & G0 != 0
}

fn has_double_group(m: u64) -> bool {
    ((m & (m >> 1)) | (m & (m >> 2)) | ((m >> 1) & (m >> 2))) & G0 != 0
}

/// All 945 rooted binary trees on 0..5 with their displayed-triplet masks,
/// plus, per triplet, the set of trees displaying it.
pub struct SixLeafTrees {
    pub clusters: Vec<Vec<u32>>,
    pub masks: Vec<u64>,
    displaying: Vec<Vec<u64>>,
    index: TripletIndex,
}

impl SixLeafTrees {
    pub fn new() -> Self {
        let index = TripletIndex::new(SIX);
        let clusters = cluster_sets(SIX);
        let masks: Vec<u64> = clusters.iter().map(|c| index.mask(c)[0]).collect();
        let words = masks.len().div_ceil(64);
        let mut displaying = vec![vec![0u64; words]; index.len()];
        for (ti, &m) in masks.iter().enumerate() {
            for (t, row) in displaying.iter_mut().enumerate() {
                if m >> t & 1 == 1 {
                    row[ti / 64] |= 1 << (ti % 64);
                }
            }
        }
        SixLeafTrees { clusters, masks, displaying, index }
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Position of a tree on labels 0..5 in the enumeration.
    pub fn position(&self, t: &RootedTree) -> Result<usize, GadgetError> {
        let mask = self.mask_of(t)?;
        Ok(self.masks.iter().position(|&m| m == mask).expect("every binary tree is enumerated"))
    }

    pub fn mask_of(&self, t: &RootedTree) -> Result<u64, GadgetError> {
        if t.label_set() != six_labels() {
            return Err(GadgetError::NotSixLeaves);
        }
        let mut m = 0u64;
        for i in 0..self.index.len() {
            let (a, b, c) = self.index.decode(i);
            let tr = crate::phylo::Triplet::new(a.into(), b.into(), c.into())?;
            if t.displays(&tr)? {
                m |= 1 << i;
            }
        }
        Ok(m)
    }

    pub fn tree(&self, i: usize) -> RootedTree {
        let ls = six_labels();
        let sets: Vec<BTreeSet<Label>> = self.clusters[i]
            .iter()
            .map(|&c| (0..SIX).filter(|&x| c >> x & 1 == 1).map(Label::from).collect())
            .collect();
        RootedTree::from_clusters(&ls, &sets).expect("enumerated")
    }

    /// Non-decreasing index triples whose masks jointly cover `target`.
    /// Stops early once `stop` returns true for a found triple.
    pub fn covering_triples(&self, target: u64, stop: &(dyn Fn(&[usize; 3]) -> bool + Sync)) -> Vec<[usize; 3]> {
        let n = self.masks.len();
        let words = n.div_ceil(64);
        let halt = AtomicBool::new(false);
        let per: Vec<Vec<[usize; 3]>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut out = Vec::new();
                if halt.load(AtomicOrdering::Relaxed) {
                    return out;
                }
                let r1 = target & !self.masks[i];
                if has_full_group(r1) {
                    return out;
                }
                let mut cand = vec![0u64; words];
                for j in i..n {
                    let r2 = r1 & !self.masks[j];
                    if has_double_group(r2) {
                        continue;
                    }
                    cand.iter_mut().for_each(|w| *w = u64::MAX);
                    let mut bits = r2;
                    while bits != 0 {
                        let t = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        for (c, d) in cand.iter_mut().zip(&self.displaying[t]) {
                            *c &= d;
                        }
                    }
                    for (w, &word) in cand.iter().enumerate() {
                        let mut b = word;
                        while b != 0 {
                            let k = w * 64 + b.trailing_zeros() as usize;
                            b &= b - 1;
                            if k >= j && k < n {
                                let t = [i, j, k];
                                out.push(t);
                                if stop(&t) {
                                    halt.store(true, AtomicOrdering::Relaxed);
                                    return out;
                                }
                            }
                        }
                    }
                }
                out
            })
            .collect();
        per.into_iter().flatten().collect()
    }
}

impl Default for SixLeafTrees {
    fn default() -> Self {
        Self::new()
    }
}

fn six_labels() -> BTreeSet<Label> {
    (0..SIX).map(Label::from).collect()
}

/// Three caterpillars on 0..5 together with their root-first orderings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaterpillarTriple {
    pub trees: [RootedTree; 3],
    pub orderings: [LinearOrdering<Label>; 3],
}

impl CaterpillarTriple {
    pub fn from_orderings(seqs: [&[usize]; 3]) -> Self {
        let ord = |s: &[usize]| LinearOrdering::new(s.iter().map(|&x| Label::from(x)).collect()).expect("distinct");
        let orderings = [ord(seqs[0]), ord(seqs[1]), ord(seqs[2])];
        let trees = [0, 1, 2].map(|i| RootedTree::caterpillar(orderings[i].as_slice()).expect("non-empty"));
        CaterpillarTriple { trees, orderings }
    }

    /// Every triplet displayed by one of the three caterpillars.
    pub fn triplets(&self) -> crate::phylo::TripletSet {
        self.trees.iter().flat_map(|t| t.displayed_triplets().iter().cloned().collect::<Vec<_>>()).collect()
    }
}

fn permutations(xs: &[usize]) -> Vec<Vec<usize>> {
    if xs.len() <= 1 {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Candidate root-first sequences per slot: slot 1 has 5 on top and the
/// cherry {0,1} and 4 above 2; slot 2 has 1 on top, the cherry {0,5} and 2
/// below 3 and 4. Slot 3 has 0 on top and 2 above 3, 4 and 5. Each list is in lexicographic order with the
/// cherry written smaller label first.
pub fn candidate_sequences() -> [Vec<Vec<usize>>; 3] {
    let middle = permutations(&[2, 3, 4]);
    let at = |m: &[usize], x: usize| m.iter().position(|&y| y == x);
    let c1: Vec<Vec<usize>> =
        middle.iter().filter(|m| at(m, 4) < at(m, 2)).map(|m| [&[5][..], m, &[0, 1]].concat()).collect();
    let c2: Vec<Vec<usize>> = middle.iter().filter(|m| m[2] == 2).map(|m| [&[1][..], m, &[0, 5]].concat()).collect();
    let mut c3: Vec<Vec<usize>> = permutations(&[1, 2, 3, 4, 5])
        .into_iter()
        .filter(|p| p[3] < p[4])
        .filter(|p| {
            let pos = |x: usize| p.iter().position(|&y| y == x).expect("present");
            [3, 4, 5].iter().all(|&x| pos(2) < pos(x))
        })
        .map(|p| [&[0][..], &p[..]].concat())
        .collect();
    c3.sort();
    [c1, c2, c3]
}

/// Searches the seeded candidate triples in lexicographic order and returns
/// the first one whose triplet union is covered by no tree triple other than
/// its own slot permutations.
pub fn derive_caterpillar_triple() -> Result<CaterpillarTriple, GadgetError> {
    let trees = SixLeafTrees::new();
    let [c1, c2, c3] = candidate_sequences();
    let total = c1.len() * c2.len() * c3.len();
    for a in &c1 {
        for b in &c2 {
            for c in &c3 {
                let cand = CaterpillarTriple::from_orderings([a, b, c]);
                if tree_triple_is_unique(&trees, &cand.trees)? {
                    return Ok(cand);
                }
            }
        }
    }
    Err(GadgetError::NoTriple(total))
}

fn sorted3(mut x: [usize; 3]) -> [usize; 3] {
    x.sort_unstable();
    x
}

fn tree_triple_is_unique(trees: &SixLeafTrees, triple: &[RootedTree; 3]) -> Result<bool, GadgetError> {
    let idx = sorted3([trees.position(&triple[0])?, trees.position(&triple[1])?, trees.position(&triple[2])?]);
    let target = idx.iter().fold(0u64, |m, &i| m | trees.masks[i]);
    let found = trees.covering_triples(target, &|t| *t != idx);
    Ok(found.len() == 1 && found[0] == idx)
}

const REPORTED_COVERS: usize = 32;

#[derive(Debug, Clone, Serialize)]
pub struct TreeGadgetReport {
    pub trees: Vec<String>,
    pub triplets: usize,
    pub trees_per_slot: usize,
    pub covering_count: usize,
    /// The first covering tree multisets, each as three Newick strings.
    pub covering: Vec<Vec<String>>,
    pub covering_ordered: u64,
    /// Covering multisets other than the input that use a tree with two or
    /// more cherries.
    pub multi_cherry_alternatives: usize,
    pub unique: bool,
}

/// Enumerates every multiset of three trees on 0..5 that covers the triplets
/// displayed by `triple`.
pub fn verify_tree_uniqueness(triple: &[RootedTree; 3]) -> Result<TreeGadgetReport, GadgetError> {
    let trees = SixLeafTrees::new();
    let idx = sorted3([trees.position(&triple[0])?, trees.position(&triple[1])?, trees.position(&triple[2])?]);
    let target = idx.iter().fold(0u64, |m, &i| m | trees.masks[i]);
    let mut found = trees.covering_triples(target, &|_| false);
    found.sort_unstable();
    let arrangements = |t: &[usize; 3]| -> u64 {
        match (t[0] == t[1], t[1] == t[2]) {
            (true, true) => 1,
            (false, false) => 6,
            _ => 3,
        }
    };
    let cherries = |i: usize| trees.clusters[i].iter().filter(|c| c.count_ones() == 2).count();
    let multi_cherry = found.iter().filter(|t| **t != idx).filter(|t| t.iter().any(|&i| cherries(i) >= 2)).count();
    Ok(TreeGadgetReport {
        trees: triple.iter().map(RootedTree::to_newick).collect(),
        triplets: target.count_ones() as usize,
        trees_per_slot: trees.len(),
        covering_count: found.len(),
        covering: found
            .iter()
            .take(REPORTED_COVERS)
            .map(|t| t.iter().map(|&i| trees.tree(i).to_newick()).collect())
            .collect(),
        covering_ordered: found.iter().map(arrangements).sum(),
        multi_cherry_alternatives: multi_cherry,
        unique: found == [idx],
    })
}
