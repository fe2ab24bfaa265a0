//! Exact decision and enumeration for k-Π instances.
//!
//! Solutions are multisets of exactly `k` orderings (repeats allowed, which is
//! the same as "at most k"). The exhaustive and branch-and-bound modes only
//! visit tuples whose members are lexicographically non-decreasing, so every
//! multiset is seen once; the number of ordered tuples is recovered from
//! multiplicities. The clause-learning mode encodes each ordering by pairwise
//! precedence variables.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::orderings::{Constraint, Instance, LinearOrdering, Perm, PiFamily, VarId, TRIVIAL_FOR_TWO};
use crate::sat::{solve_cdcl, Cnf, Lit, SatOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("ordering {index} does not range over the instance variables")]
    DomainMismatch { index: usize },
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("exhaustive mode supports at most {max} variables, got {got}")]
    TooLarge { max: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    BranchAndBound,
    ClauseLearning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Fixes the relative order of the first two variables in every ordering
    /// for reversal-closed families. Ignored when enumerating.
    pub symmetry_breaking: bool,
    pub enumerate_all: bool,
    pub node_limit: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { mode: Mode::BranchAndBound, symmetry_breaking: true, enumerate_all: false, node_limit: None }
    }
}

impl SolverConfig {
    pub fn exhaustive() -> Self {
        SolverConfig { mode: Mode::Exhaustive, ..Self::default() }
    }

    pub fn enumerate(mode: Mode) -> Self {
        SolverConfig { mode, symmetry_breaking: false, enumerate_all: true, node_limit: None }
    }

    pub fn with_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    fn effective_symmetry(&self) -> bool {
        self.symmetry_breaking && !self.enumerate_all
    }
}

/// A multiset of orderings, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Solution {
    orderings: Vec<LinearOrdering>,
}

impl Solution {
    pub fn new(mut orderings: Vec<LinearOrdering>) -> Self {
        orderings.sort();
        Solution { orderings }
    }

    pub fn orderings(&self) -> &[LinearOrdering] {
        &self.orderings
    }

    pub fn len(&self) -> usize {
        self.orderings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orderings.is_empty()
    }

    /// Number of distinct ordered tuples with this multiset of members.
    pub fn arrangements(&self) -> u64 {
        let mut out = factorial(self.orderings.len() as u64);
        let mut i = 0;
        while i < self.orderings.len() {
            let mut j = i;
            while j < self.orderings.len() && self.orderings[j] == self.orderings[i] {
                j += 1;
            }
            out /= factorial((j - i) as u64);
            i = j;
        }
        out
    }

    pub fn report(&self, inst: &Instance) -> SolutionReport {
        SolutionReport {
            orderings: self.orderings.iter().map(|o| o.iter().map(|v| inst.name(*v).to_string()).collect()).collect(),
        }
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionReport {
    pub orderings: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Sat(Solution),
    Unsat,
    Unknown,
}

impl Outcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, Outcome::Sat(_))
    }

    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Outcome::Sat(s) => Some(s),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Sat(_) => "sat",
            Outcome::Unsat => "unsat",
            Outcome::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Canonically ordered multisets.
    pub solutions: Vec<Solution>,
    /// Count of ordered k-tuples.
    pub ordered: u64,
    pub nodes: u64,
}

/// True iff every constraint is satisfied by some member and there are at
/// most `k` members.
pub fn check_solution(inst: &Instance, sol: &Solution) -> Result<bool, SolverError> {
    let m = inst.num_vars();
    for (index, o) in sol.orderings().iter().enumerate() {
        if o.len() != m || o.iter().any(|v| v.index() >= m) {
            return Err(SolverError::DomainMismatch { index });
        }
    }
    if sol.len() > inst.k {
        return Ok(false);
    }
    Ok(inst
        .constraints()
        .iter()
        .all(|c| sol.orderings().iter().any(|o| inst.pi.contains(o.pattern(c).expect("domain checked")))))
}

/// Decides `inst`. Families solved by any ordering together with its
/// reversal answer at once when `k >= 2`.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolveReport, SolverError> {
    if inst.k >= 2 && TRIVIAL_FOR_TWO.contains(&inst.pi.index()) {
        let id = inst.identity_ordering();
        let pair = Solution::new(vec![id.reversal(), id]);
        return Ok(SolveReport { outcome: Outcome::Sat(pair), nodes: 0 });
    }
    match cfg.mode {
        Mode::Exhaustive => Exhaustive::new(inst, cfg)?.solve(),
        Mode::BranchAndBound => Ok(Compiled::new(inst, cfg).solve()),
        Mode::ClauseLearning => Ok(Precedence::new(inst, cfg.effective_symmetry()).solve(cfg.node_limit)),
    }
}

pub fn enumerate_solutions(inst: &Instance, cfg: &SolverConfig) -> Result<Enumeration, SolverError> {
    let cfg = SolverConfig { enumerate_all: true, symmetry_breaking: false, ..*cfg };
    let mut found = match cfg.mode {
        Mode::Exhaustive => Exhaustive::new(inst, &cfg)?.enumerate()?,
        Mode::BranchAndBound => Compiled::new(inst, &cfg).enumerate()?,
        Mode::ClauseLearning => Precedence::new(inst, false).enumerate(cfg.node_limit)?,
    };
    found.solutions.sort();
    found.ordered = found.solutions.iter().map(Solution::arrangements).sum();
    Ok(found)
}

/// Convenience: exhaustive for tiny domains, clause learning otherwise.
pub fn is_satisfiable(inst: &Instance) -> bool {
    let cfg = if inst.num_vars() <= 5 {
        SolverConfig::exhaustive()
    } else {
        SolverConfig { mode: Mode::ClauseLearning, ..SolverConfig::default() }
    };
    match solve(inst, &cfg).expect("unbounded search").outcome {
        Outcome::Sat(_) => true,
        Outcome::Unsat => false,
        Outcome::Unknown => unreachable!("no node limit"),
    }
}

const EXHAUSTIVE_MAX_VARS: usize = 9;
const DEFAULT_TUPLE_BUDGET: u64 = 20_000_000_000;

fn next_permutation(p: &mut [u32]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All orderings in lexicographic order with per-ordering satisfaction bitsets.
struct Exhaustive {
    perms: Vec<Vec<u32>>,
    bits: Vec<Vec<u64>>,
    full: Vec<u64>,
    k: usize,
    limit: u64,
}

impl Exhaustive {
    fn new(inst: &Instance, cfg: &SolverConfig) -> Result<Self, SolverError> {
        let m = inst.num_vars();
        if m > EXHAUSTIVE_MAX_VARS {
            return Err(SolverError::TooLarge { max: EXHAUSTIVE_MAX_VARS, got: m });
        }
        let n = inst.constraints().len();
        let words = n.div_ceil(64);
        let mut full = vec![0u64; words];
        for i in 0..n {
            full[i / 64] |= 1 << (i % 64);
        }
        let limit = cfg.node_limit.unwrap_or(DEFAULT_TUPLE_BUDGET);
        let count = factorial(m as u64);
        let tuples = multichoose(count, inst.k as u64);
        if tuples.is_none_or(|t| t > limit) {
            return Err(SolverError::BudgetExceeded(limit));
        }
        let mut perms = Vec::with_capacity(count as usize);
        let mut p: Vec<u32> = (0..m as u32).collect();
        loop {
            perms.push(p.clone());
            if !next_permutation(&mut p) {
                break;
            }
        }
        let bits = perms
            .par_iter()
            .map(|p| {
                let mut pos = vec![0usize; m];
                for (i, &v) in p.iter().enumerate() {
                    pos[v as usize] = i;
                }
                let mut b = vec![0u64; words];
                for (i, c) in inst.constraints().iter().enumerate() {
                    if inst.pi.accepts_positions([pos[c.0.index()], pos[c.1.index()], pos[c.2.index()]]) {
                        b[i / 64] |= 1 << (i % 64);
                    }
                }
                b
            })
            .collect();
        Ok(Exhaustive { perms, bits, full, k: inst.k, limit })
    }

    fn ordering(&self, i: usize) -> LinearOrdering {
        self.perms[i].iter().map(|&v| VarId(v)).collect()
    }

    fn solution(&self, idx: &[usize]) -> Solution {
        Solution::new(idx.iter().map(|&i| self.ordering(i)).collect())
    }

    /// Walks non-decreasing index tuples starting with `first`; `visit`
    /// returns false to stop.
    fn walk(&self, first: usize, nodes: &mut u64, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let w = self.full.len();
        let mut idx = vec![first];
        let mut acc = vec![0u64; w * self.k];
        acc[..w].copy_from_slice(&self.bits[first]);
        self.walk_rec(&mut idx, &mut acc, nodes, visit);
    }

    fn walk_rec(
        &self,
        idx: &mut Vec<usize>,
        acc: &mut [u64],
        nodes: &mut u64,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        *nodes += 1;
        let w = self.full.len();
        let level = idx.len();
        if level == self.k {
            let cur = &acc[(level - 1) * w..level * w];
            if cur.iter().zip(&self.full).all(|(a, f)| a & f == *f) {
                return visit(idx);
            }
            return true;
        }
        let start = *idx.last().expect("non-empty");
        for j in start..self.perms.len() {
            let (done, rest) = acc.split_at_mut(level * w);
            let cur = &done[(level - 1) * w..];
            for ((d, a), b) in rest[..w].iter_mut().zip(cur).zip(&self.bits[j]) {
                *d = a | b;
            }
            idx.push(j);
            let go_on = self.walk_rec(idx, acc, nodes, visit);
            idx.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    fn solve(&self) -> Result<SolveReport, SolverError> {
        let best = AtomicUsize::new(usize::MAX);
        let results: Vec<(Option<Vec<usize>>, u64)> = (0..self.perms.len())
            .into_par_iter()
            .map(|first| {
                if best.load(AtomicOrdering::Relaxed) < first {
                    return (None, 0);
                }
                let mut nodes = 0;
                let mut hit = None;
                self.walk(first, &mut nodes, &mut |idx| {
                    hit = Some(idx.to_vec());
                    false
                });
                if hit.is_some() {
                    best.fetch_min(first, AtomicOrdering::Relaxed);
                }
                (hit, nodes)
            })
            .collect();
        let nodes = results.iter().map(|r| r.1).sum();
        let outcome = match results.into_iter().find_map(|r| r.0) {
            Some(idx) => Outcome::Sat(self.solution(&idx)),
            None => Outcome::Unsat,
        };
        Ok(SolveReport { outcome, nodes })
    }

    fn enumerate(&self) -> Result<Enumeration, SolverError> {
        let results: Vec<(Vec<Solution>, u64)> = (0..self.perms.len())
            .into_par_iter()
            .map(|first| {
                let mut nodes = 0;
                let mut out = Vec::new();
                self.walk(first, &mut nodes, &mut |idx| {
                    out.push(self.solution(idx));
                    true
                });
                (out, nodes)
            })
            .collect();
        let nodes: u64 = results.iter().map(|r| r.1).sum();
        if nodes > self.limit {
            return Err(SolverError::BudgetExceeded(self.limit));
        }
        let solutions = results.into_iter().flat_map(|r| r.0).collect();
        Ok(Enumeration { solutions, ordered: 0, nodes })
    }
}

fn multichoose(n: u64, k: u64) -> Option<u64> {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 + i) / (i + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Prefix automaton over placed constraint symbols: state `s` is a sequence
/// of distinct symbols from {0,1,2}; `viable[s]` says whether it starts some
/// pattern of the family.
struct Automaton {
    next: Vec<[u8; 3]>,
    viable: Vec<bool>,
}

impl Automaton {
    fn new(pi: PiFamily) -> Self {
        let mut seqs: Vec<Vec<u8>> = vec![vec![]];
        let mut next: Vec<[u8; 3]> = Vec::new();
        let mut i = 0;
        while i < seqs.len() {
            let mut row = [u8::MAX; 3];
            for s in 0..3u8 {
                if !seqs[i].contains(&s) {
                    let mut t = seqs[i].clone();
                    t.push(s);
                    row[s as usize] = seqs.len() as u8;
                    seqs.push(t);
                }
            }
            next.push(row);
            i += 1;
        }
        let perms = pi.perms();
        let viable = seqs
            .iter()
            .map(|s| perms.iter().any(|p: &Perm| s.iter().zip(p.0.iter()).all(|(a, b)| a + 1 == *b)))
            .collect();
        Automaton { next, viable }
    }
}

struct Compiled {
    m: usize,
    k: usize,
    n: usize,
    occ: Vec<Vec<(u32, u8)>>,
    auto: Automaton,
    order: Vec<u32>,
    sym_pair: Option<(u32, u32)>,
    limit: u64,
    enumerate: bool,
}

enum Halt {
    Limit,
    Stop,
}

impl Compiled {
    fn new(inst: &Instance, cfg: &SolverConfig) -> Self {
        let m = inst.num_vars();
        let mut occ = vec![Vec::new(); m];
        for (i, c) in inst.constraints().iter().enumerate() {
            let Constraint(a, b, d) = *c;
            occ[a.index()].push((i as u32, 0));
            occ[b.index()].push((i as u32, 1));
            occ[d.index()].push((i as u32, 2));
        }
        let mut order: Vec<u32> = (0..m as u32).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(occ[v as usize].len()), v));
        let sym_pair = (cfg.effective_symmetry() && inst.pi.reversal_closed() && m >= 2).then_some((0, 1));
        Compiled {
            m,
            k: inst.k,
            n: inst.constraints().len(),
            occ,
            auto: Automaton::new(inst.pi),
            order,
            sym_pair,
            limit: cfg.node_limit.unwrap_or(u64::MAX),
            enumerate: cfg.enumerate_all,
        }
    }

    fn root(&self) -> Search<'_> {
        Search {
            c: self,
            seqs: vec![Vec::with_capacity(self.m); self.k],
            placed: vec![vec![false; self.m]; self.k],
            cstate: vec![0; self.k * self.n],
            alive: vec![self.k as u32; self.n],
            tied: vec![true; self.k],
            trail: Vec::new(),
            nodes: 0,
            found: Vec::new(),
        }
    }

    /// Root branches: the first variable of ordering 0.
    fn branches(&self) -> Vec<u32> {
        if self.m == 0 {
            return Vec::new();
        }
        let s = self.root();
        self.order.iter().copied().filter(|&v| s.allowed(0, 0, v)).collect()
    }

    fn solve(&self) -> SolveReport {
        if self.m == 0 {
            let outcome = if self.n == 0 {
                Outcome::Sat(Solution::new(vec![LinearOrdering::empty(); self.k]))
            } else {
                Outcome::Unsat
            };
            return SolveReport { outcome, nodes: 1 };
        }
        let best = AtomicUsize::new(usize::MAX);
        let shared = AtomicU64::new(0);
        let branches = self.branches();
        let results: Vec<(Result<Option<Solution>, ()>, u64)> = branches
            .par_iter()
            .enumerate()
            .map(|(bi, &v)| {
                if best.load(AtomicOrdering::Relaxed) < bi {
                    return (Ok(None), 0);
                }
                let mut s = self.root();
                let res = s.branch(v, &best, bi, &shared);
                let nodes = s.nodes;
                match res {
                    Err(Halt::Limit) => (Err(()), nodes),
                    Err(Halt::Stop) => (Ok(None), nodes),
                    Ok(()) => {
                        let sol = s.found.pop();
                        if sol.is_some() {
                            best.fetch_min(bi, AtomicOrdering::Relaxed);
                        }
                        (Ok(sol), nodes)
                    }
                }
            })
            .collect();
        let nodes = results.iter().map(|r| r.1).sum();
        let mut unknown = false;
        for (r, _) in &results {
            match r {
                Ok(Some(sol)) => return SolveReport { outcome: Outcome::Sat(sol.clone()), nodes },
                Err(()) => unknown = true,
                Ok(None) => {}
            }
        }
        SolveReport { outcome: if unknown { Outcome::Unknown } else { Outcome::Unsat }, nodes }
    }

    fn enumerate(&self) -> Result<Enumeration, SolverError> {
        if self.m == 0 {
            let solutions =
                if self.n == 0 { vec![Solution::new(vec![LinearOrdering::empty(); self.k])] } else { vec![] };
            return Ok(Enumeration { solutions, ordered: 0, nodes: 1 });
        }
        let best = AtomicUsize::new(usize::MAX);
        let shared = AtomicU64::new(0);
        let results: Vec<Result<(Vec<Solution>, u64), SolverError>> = self
            .branches()
            .par_iter()
            .enumerate()
            .map(|(bi, &v)| {
                let mut s = self.root();
                match s.branch(v, &best, bi, &shared) {
                    Ok(()) => Ok((std::mem::take(&mut s.found), s.nodes)),
                    Err(_) => Err(SolverError::BudgetExceeded(self.limit)),
                }
            })
            .collect();
        let mut solutions = Vec::new();
        let mut nodes = 0;
        for r in results {
            let (s, n) = r?;
            solutions.extend(s);
            nodes += n;
        }
        Ok(Enumeration { solutions, ordered: 0, nodes })
    }
}

struct Search<'a> {
    c: &'a Compiled,
    seqs: Vec<Vec<u32>>,
    placed: Vec<Vec<bool>>,
    cstate: Vec<u8>,
    alive: Vec<u32>,
    tied: Vec<bool>,
    trail: Vec<(u32, u8)>,
    nodes: u64,
    found: Vec<Solution>,
}

const FLUSH: u64 = 1 << 12;

impl Search<'_> {
    fn allowed(&self, t: usize, p: usize, v: u32) -> bool {
        if self.placed[t][v as usize] {
            return false;
        }
        if t > 0 && self.tied[t] && v < self.seqs[t - 1][p] {
            return false;
        }
        match self.c.sym_pair {
            Some((x, y)) if v == y => self.placed[t][x as usize],
            _ => true,
        }
    }

    /// Places `v`; returns false (after full bookkeeping) if some constraint
    /// lost its last viable ordering.
    fn place(&mut self, t: usize, v: u32) -> bool {
        let c = self.c;
        let base = t * c.n;
        let mut ok = true;
        for &(ci, sym) in &c.occ[v as usize] {
            let idx = base + ci as usize;
            let old = self.cstate[idx];
            let new = c.auto.next[old as usize][sym as usize];
            self.trail.push((idx as u32, old));
            self.cstate[idx] = new;
            if c.auto.viable[old as usize] && !c.auto.viable[new as usize] {
                self.alive[ci as usize] -= 1;
                if self.alive[ci as usize] == 0 {
                    ok = false;
                }
            }
        }
        let p = self.seqs[t].len();
        self.seqs[t].push(v);
        self.placed[t][v as usize] = true;
        if t > 0 && self.tied[t] && self.seqs[t - 1][p] != v {
            self.tied[t] = false;
            self.trail.push((u32::MAX, t as u8));
        }
        ok
    }

    fn unplace(&mut self, t: usize, mark: usize) {
        let c = self.c;
        while self.trail.len() > mark {
            let (idx, old) = self.trail.pop().expect("trail");
            if idx == u32::MAX {
                self.tied[old as usize] = true;
                continue;
            }
            let cur = self.cstate[idx as usize];
            if c.auto.viable[old as usize] && !c.auto.viable[cur as usize] {
                self.alive[idx as usize % c.n] += 1;
            }
            self.cstate[idx as usize] = old;
        }
        let v = self.seqs[t].pop().expect("placed");
        self.placed[t][v as usize] = false;
    }

    fn tick(&mut self, best: &AtomicUsize, me: usize, shared: &AtomicU64) -> Result<(), Halt> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(FLUSH) {
            let total = shared.fetch_add(FLUSH, AtomicOrdering::Relaxed) + FLUSH;
            if total > self.c.limit {
                return Err(Halt::Limit);
            }
            if !self.c.enumerate && best.load(AtomicOrdering::Relaxed) < me {
                return Err(Halt::Stop);
            }
        }
        if self.nodes > self.c.limit {
            return Err(Halt::Limit);
        }
        Ok(())
    }

    fn branch(&mut self, v: u32, best: &AtomicUsize, me: usize, shared: &AtomicU64) -> Result<(), Halt> {
        self.tick(best, me, shared)?;
        let mark = self.trail.len();
        if self.place(0, v) {
            self.dfs(1, best, me, shared)?;
        }
        self.unplace(0, mark);
        Ok(())
    }

    /// Returns Ok after exhausting the subtree, or after the first solution
    /// when not enumerating (then `found` is non-empty).
    fn dfs(&mut self, step: usize, best: &AtomicUsize, me: usize, shared: &AtomicU64) -> Result<(), Halt> {
        let c = self.c;
        if step == c.k * c.m {
            let sol = Solution::new(self.seqs.iter().map(|s| s.iter().map(|&v| VarId(v)).collect()).collect());
            self.found.push(sol);
            return Ok(());
        }
        let t = step % c.k;
        let p = step / c.k;
        for i in 0..c.order.len() {
            let v = c.order[i];
            if !self.allowed(t, p, v) {
                continue;
            }
            self.tick(best, me, shared)?;
            let mark = self.trail.len();
            if self.place(t, v) {
                self.dfs(step + 1, best, me, shared)?;
            }
            self.unplace(t, mark);
            if !c.enumerate && !self.found.is_empty() {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// CNF over `before(s, u, v)` for `u < v`, transitivity per ordering, and per
/// constraint a clause over "ordering `s` shows accepted pattern `q`".
struct Precedence {
    m: usize,
    k: usize,
    cnf: Cnf,
}

impl Precedence {
    fn pairs(m: usize) -> usize {
        m * m.saturating_sub(1) / 2
    }

    fn pair_var(m: usize, s: usize, u: usize, v: usize) -> usize {
        let (a, b) = (u.min(v), u.max(v));
        s * Self::pairs(m) + a * (2 * m - a - 1) / 2 + (b - a - 1)
    }

    fn before(m: usize, s: usize, u: usize, v: usize) -> Lit {
        let x = Self::pair_var(m, s, u, v);
        if u < v {
            Lit::pos(x)
        } else {
            Lit::neg(x)
        }
    }

    fn new(inst: &Instance, symmetry: bool) -> Self {
        let (m, k) = (inst.num_vars(), inst.k);
        let mut cnf = Cnf::new(k * Self::pairs(m));
        for s in 0..k {
            for u in 0..m {
                for v in 0..m {
                    for w in 0..m {
                        if u != v && v != w && u != w {
                            let (uv, vw, uw) =
                                (Self::before(m, s, u, v), Self::before(m, s, v, w), Self::before(m, s, u, w));
                            cnf.add(vec![!uv, !vw, uw]);
                        }
                    }
                }
            }
        }
        let ranks: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for c in inst.constraints() {
            let x = [c.0.index(), c.1.index(), c.2.index()];
            let mut clause = Vec::new();
            for s in 0..k {
                for r in ranks.iter().filter(|r| inst.pi.accepts_positions(**r)) {
                    let z = cnf.vars;
                    cnf.vars += 1;
                    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                        let lit =
                            if r[i] < r[j] { Self::before(m, s, x[i], x[j]) } else { Self::before(m, s, x[j], x[i]) };
                        cnf.add(vec![Lit::neg(z), lit]);
                    }
                    clause.push(Lit::pos(z));
                }
            }
            cnf.add(clause);
        }
        if symmetry && inst.pi.reversal_closed() && m >= 2 {
            for s in 0..k {
                cnf.add(vec![Self::before(m, s, 0, 1)]);
            }
        }
        Precedence { m, k, cnf }
    }

    fn decode(&self, value: &[bool]) -> Vec<LinearOrdering> {
        (0..self.k)
            .map(|s| {
                let mut vs: Vec<usize> = (0..self.m).collect();
                let earlier = |u: usize| (0..self.m).filter(|&v| v != u && self.holds(value, s, v, u)).count();
                vs.sort_by_key(|&u| earlier(u));
                vs.into_iter().map(|v| VarId(v as u32)).collect()
            })
            .collect()
    }

    fn holds(&self, value: &[bool], s: usize, u: usize, v: usize) -> bool {
        let l = Self::before(self.m, s, u, v);
        value[l.var()] != l.is_neg()
    }

    fn solve(&self, limit: Option<u64>) -> SolveReport {
        let (out, conflicts) = solve_cdcl(&self.cnf, limit);
        let outcome = match out {
            SatOutcome::Sat(value) => Outcome::Sat(Solution::new(self.decode(&value))),
            SatOutcome::Unsat => Outcome::Unsat,
            SatOutcome::Unknown => Outcome::Unknown,
        };
        SolveReport { outcome, nodes: conflicts }
    }

    /// Repeated solving, blocking every slot arrangement of each solution.
    fn enumerate(&self, limit: Option<u64>) -> Result<Enumeration, SolverError> {
        let mut cnf = self.cnf.clone();
        let mut solutions = Vec::new();
        let mut nodes = 0u64;
        loop {
            let left = limit.map(|l| l.saturating_sub(nodes));
            let (out, conflicts) = solve_cdcl(&cnf, left);
            nodes += conflicts + 1;
            match out {
                SatOutcome::Unsat => break,
                SatOutcome::Unknown => return Err(SolverError::BudgetExceeded(limit.unwrap_or(u64::MAX))),
                SatOutcome::Sat(value) => {
                    let sol = Solution::new(self.decode(&value));
                    for perm in slot_permutations(self.k) {
                        let mut block = Vec::new();
                        for (s, &src) in perm.iter().enumerate() {
                            let o = &sol.orderings()[src];
                            for w in o.as_slice().windows(2) {
                                block.push(!Self::before(self.m, s, w[0].index(), w[1].index()));
                            }
                        }
                        cnf.add(block);
                    }
                    solutions.push(sol);
                    if limit.is_some_and(|l| nodes > l) {
                        return Err(SolverError::BudgetExceeded(limit.unwrap_or(u64::MAX)));
                    }
                }
            }
        }
        Ok(Enumeration { solutions, ordered: 0, nodes })
    }
}

fn slot_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &out {
            for x in (0..k).filter(|x| !p.contains(x)) {
                let mut q: Vec<usize> = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}
