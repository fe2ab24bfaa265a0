//! Exact τ(n) and τ_c(n) through the 0/1 covering model.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::{ExtremalError, FullIndex};
use crate::phylo::{aho_build, Label, RootedTree, Triplet};
use crate::sat::{Cnf, Lit, SatOutcome, Search, Var};

/// The covering model for `k` slots over leaves `1..=n`. Slot `t` owns the
/// variables `t * 3C(n,3) ..`, one per triplet of the full set.
#[derive(Debug, Clone)]
pub struct CoverModel {
    pub n: usize,
    pub k: usize,
    pub caterpillar: bool,
    pub index: FullIndex,
    /// Per slot and leaf triple: the three orientations.
    pub trichotomy: Vec<[Var; 3]>,
    /// `(x, y, z)` with `x + y - z <= 1`.
    pub closure: BTreeSet<(Var, Var, Var)>,
    /// `(x, y)` with `x + y <= 1`.
    pub cherry: BTreeSet<(Var, Var)>,
}

impl CoverModel {
    pub fn new(n: usize, k: usize, caterpillar: bool) -> Result<Self, ExtremalError> {
        let index = FullIndex::new(n)?;
        let m = index.len();
        let mut trichotomy = Vec::new();
        let mut closure = BTreeSet::new();
        let mut cherry = BTreeSet::new();
        for t in 0..k {
            let v = |a: usize, b: usize, c: usize| t * m + index.var(a, b, c);
            for i in 0..index.triples() {
                trichotomy.push([t * m + 3 * i, t * m + 3 * i + 1, t * m + 3 * i + 2]);
            }
            for a in 1..=n {
                for b in 1..=n {
                    for c in 1..=n {
                        for d in 1..=n {
                            if [a, b, c, d].iter().collect::<BTreeSet<_>>().len() < 4 {
                                continue;
                            }
                            closure.insert((v(a, b, c), v(b, c, d), v(a, b, d)));
                            closure.insert((v(a, b, c), v(b, c, d), v(a, c, d)));
                            if caterpillar {
                                let (x, y) = (v(a, b, c), v(c, d, a));
                                cherry.insert((x.min(y), x.max(y)));
                            }
                        }
                    }
                }
            }
        }
        Ok(CoverModel { n, k, caterpillar, index, trichotomy, closure, cherry })
    }

    pub fn vars(&self) -> usize {
        self.k * self.index.len()
    }

    fn slot_var(&self, t: usize, i: usize) -> Var {
        t * self.index.len() + i
    }

    /// Clause form of constraint groups (1) to (5).
    pub fn cnf(&self) -> Cnf {
        let mut cnf = self.structure_cnf();
        for i in 0..self.index.len() {
            cnf.add((0..self.k).map(|t| Lit::pos(self.slot_var(t, i))).collect());
        }
        cnf
    }

    /// Groups (2) to (5) only: every slot is a tree (caterpillar).
    pub fn structure_cnf(&self) -> Cnf {
        let mut cnf = Cnf::new(self.vars());
        for &[x, y, z] in &self.trichotomy {
            cnf.add(vec![Lit::pos(x), Lit::pos(y), Lit::pos(z)]);
            cnf.add(vec![Lit::neg(x), Lit::neg(y)]);
            cnf.add(vec![Lit::neg(x), Lit::neg(z)]);
            cnf.add(vec![Lit::neg(y), Lit::neg(z)]);
        }
        for &(x, y, z) in &self.closure {
            cnf.add(vec![Lit::neg(x), Lit::neg(y), Lit::pos(z)]);
        }
        for &(x, y) in &self.cherry {
            cnf.add(vec![Lit::neg(x), Lit::neg(y)]);
        }
        cnf
    }

    fn var_name(&self, v: Var) -> String {
        let m = self.index.len();
        let t = self.index.triplet(v % m);
        format!("x_{}_{}_{}_{}", t.a, t.b, t.c, v / m + 1)
    }

    /// CPLEX LP text of the model.
    pub fn to_lp(&self) -> String {
        let m = self.index.len();
        let mut out = String::new();
        let _ = writeln!(out, "\\ triplet cover: n = {}, k = {}, caterpillars = {}", self.n, self.k, self.caterpillar);
        let _ = writeln!(out, "Minimize\n obj: 0 {}\nSubject To", self.var_name(0));
        let mut row = 0usize;
        let mut line = |out: &mut String, body: String| {
            row += 1;
            let _ = writeln!(out, " r{row}: {body}");
        };
        for i in 0..m {
            let terms: Vec<String> = (0..self.k).map(|t| self.var_name(self.slot_var(t, i))).collect();
            line(&mut out, format!("{} >= 1", terms.join(" + ")));
        }
        for &[x, y, z] in &self.trichotomy {
            line(&mut out, format!("{} + {} + {} = 1", self.var_name(x), self.var_name(y), self.var_name(z)));
        }
        for &(x, y, z) in &self.closure {
            line(&mut out, format!("{} + {} - {} <= 1", self.var_name(x), self.var_name(y), self.var_name(z)));
        }
        for &(x, y) in &self.cherry {
            line(&mut out, format!("{} + {} <= 1", self.var_name(x), self.var_name(y)));
        }
        out.push_str("Binary\n");
        for v in 0..self.vars() {
            let _ = writeln!(out, " {}", self.var_name(v));
        }
        out.push_str("End\n");
        out
    }

    /// The triplets assigned to slot `t`.
    pub fn slot_triplets(&self, assignment: &[bool], t: usize) -> Vec<Triplet> {
        (0..self.index.len()).filter(|&i| assignment[self.slot_var(t, i)]).map(|i| self.index.triplet(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct TauDecision {
    pub n: usize,
    pub k: usize,
    pub caterpillar: bool,
    pub decision: Decision,
    #[serde(skip)]
    pub witness: Vec<RootedTree>,
    pub witness_newick: Vec<String>,
    pub nodes: u64,
}

/// Unlabeled rooted binary shapes on `n` leaves, leaves numbered `1..=n`
/// left to right.
pub fn tree_shapes(n: usize) -> Vec<RootedTree> {
    #[derive(Clone)]
    enum Shape {
        Leaf,
        Node(Box<Shape>, Box<Shape>),
    }
    fn all(n: usize, memo: &mut Vec<Vec<Shape>>) -> Vec<Shape> {
        if memo.len() > n && !memo[n].is_empty() {
            return memo[n].clone();
        }
        let out = if n == 1 {
            vec![Shape::Leaf]
        } else {
            let mut out = Vec::new();
            for a in (n.div_ceil(2)..n).rev() {
                let b = n - a;
                let left = all(a, memo);
                let right = all(b, memo);
                for (i, l) in left.iter().enumerate() {
                    for (j, r) in right.iter().enumerate() {
                        if a == b && j > i {
                            continue;
                        }
                        out.push(Shape::Node(Box::new(l.clone()), Box::new(r.clone())));
                    }
                }
            }
            out
        };
        if memo.len() <= n {
            memo.resize(n + 1, Vec::new());
        }
        memo[n] = out.clone();
        out
    }
    fn build(s: &Shape, next: &mut usize) -> RootedTree {
        match s {
            Shape::Leaf => {
                *next += 1;
                RootedTree::leaf(Label::from(*next))
            }
            Shape::Node(l, r) => {
                let l = build(l, next);
                let r = build(r, next);
                RootedTree::join(&l, &r).expect("disjoint labels")
            }
        }
    }
    if n == 0 {
        return Vec::new();
    }
    let mut memo = Vec::new();
    all(n, &mut memo)
        .iter()
        .map(|s| {
            let mut next = 0;
            build(s, &mut next)
        })
        .collect()
}

/// Decides whether `k` trees (caterpillars) display every triplet over
/// `1..=n`. Slot 1 ranges over one tree per unlabeled shape and the other
/// slots are kept in non-increasing lexicographic order of their triplet
/// vectors. The shapes are searched in parallel; the reported witness is
/// the one from the first satisfiable shape.
pub fn tau_decision(n: usize, k: usize, caterpillar: bool, budget: Option<u64>) -> Result<TauDecision, ExtremalError> {
    let model = CoverModel::new(n, k, caterpillar)?;
    let mut report =
        TauDecision { n, k, caterpillar, decision: Decision::No, witness: vec![], witness_newick: vec![], nodes: 0 };
    if k == 0 {
        return Ok(report);
    }
    let cnf = model.cnf();
    let m = model.index.len();
    let shapes: Vec<RootedTree> = if caterpillar {
        let seq: Vec<Label> = (1..=n).map(Label::from).collect();
        vec![RootedTree::caterpillar(&seq)?]
    } else {
        tree_shapes(n)
    };
    let order: Vec<(Var, bool)> = (m..model.vars()).map(|v| (v, true)).collect();
    let unknown = AtomicBool::new(false);
    let nodes = AtomicU64::new(0);
    let found = shapes.par_iter().find_map_first(|shape| {
        let shown = shape.displayed_triplets();
        let assumptions: Vec<Lit> =
            (0..m).map(|i| if shown.contains(&model.index.triplet(i)) { Lit::pos(i) } else { Lit::neg(i) }).collect();
        let mut search = Search::new(&cnf);
        let out = search.solve(&assumptions, &order, |p| lex_violation(p, m, k), budget);
        nodes.fetch_add(search.nodes, Ordering::Relaxed);
        match out {
            SatOutcome::Sat(a) => Some(a),
            SatOutcome::Unknown => {
                unknown.store(true, Ordering::Relaxed);
                None
            }
            SatOutcome::Unsat => None,
        }
    });
    report.nodes = nodes.load(Ordering::Relaxed);
    match found {
        Some(a) => {
            let labels: BTreeSet<Label> = (1..=n).map(Label::from).collect();
            for t in 0..k {
                let r = model.slot_triplets(&a, t).into_iter().collect();
                let tree = aho_build(&r, &labels)?.ok_or(ExtremalError::Inconsistent)?;
                report.witness_newick.push(tree.to_newick());
                report.witness.push(tree);
            }
            report.decision = Decision::Yes;
        }
        None if unknown.load(Ordering::Relaxed) => report.decision = Decision::Unknown,
        None => {}
    }
    Ok(report)
}

/// True when some pair of consecutive free slots is already out of order.
fn lex_violation(p: &[Option<bool>], m: usize, k: usize) -> bool {
    for t in 1..k.saturating_sub(1) {
        let (hi, lo) = (&p[t * m..(t + 1) * m], &p[(t + 1) * m..(t + 2) * m]);
        for (x, y) in hi.iter().zip(lo) {
            match (x, y) {
                (Some(x), Some(y)) if x == y => continue,
                (Some(false), Some(true)) => return true,
                _ => break,
            }
        }
    }
    false
}

#[derive(Debug, Clone, Serialize)]
pub struct TauValue {
    pub n: usize,
    pub caterpillar: bool,
    /// Smallest `k` found, or the lower bound reached when `exact` is false.
    pub value: usize,
    pub exact: bool,
    pub steps: Vec<TauDecision>,
}

/// Smallest `k` with a yes answer, searching upward from 1.
pub fn tau(n: usize, caterpillar: bool, budget: Option<u64>) -> Result<TauValue, ExtremalError> {
    let mut steps = Vec::new();
    for k in 1.. {
        let d = tau_decision(n, k, caterpillar, budget)?;
        let decision = d.decision.clone();
        steps.push(d);
        match decision {
            Decision::Yes => return Ok(TauValue { n, caterpillar, value: k, exact: true, steps }),
            Decision::Unknown => return Ok(TauValue { n, caterpillar, value: k, exact: false, steps }),
            Decision::No => {}
        }
    }
    unreachable!("k grows until a tree per triplet suffices")
}
