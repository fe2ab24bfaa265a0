use std::collections::{BTreeMap, BTreeSet};

use super::build::{aho_build, caterpillar_compatible};
use super::digraph::Digraph;
use super::tree::{Label, RootedTree};
use super::triplet::{Triplet, TripletSet};
use super::PhyloError;
use crate::extremal::FullIndex;
use crate::sat::{solve_cdcl, Cnf, Lit, SatOutcome};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompatOutcome {
    /// At most `k` trees (one per non-empty block) jointly displaying the set.
    Compatible(Vec<RootedTree>),
    Incompatible,
    Unknown,
}

impl CompatOutcome {
    pub fn is_compatible(&self) -> bool {
        matches!(self, CompatOutcome::Compatible(_))
    }

    pub fn trees(&self) -> Option<&[RootedTree]> {
        match self {
            CompatOutcome::Compatible(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatReport {
    pub outcome: CompatOutcome,
    pub nodes: u64,
}

/// Exact search for at most `k` trees (caterpillars when
/// `caterpillars_only`) that together display every triplet of `r`.
pub fn k_tree_compatible(r: &TripletSet, k: usize, caterpillars_only: bool) -> CompatOutcome {
    k_tree_compatible_with(r, k, caterpillars_only, None).outcome
}

/// As [`k_tree_compatible`]; `node_limit` caps search nodes for
/// caterpillars and conflicts for trees.
pub fn k_tree_compatible_with(
    r: &TripletSet,
    k: usize,
    caterpillars_only: bool,
    node_limit: Option<u64>,
) -> CompatReport {
    let label_set = r.labels();
    if r.is_empty() {
        return CompatReport { outcome: CompatOutcome::Compatible(Vec::new()), nodes: 0 };
    }
    if k == 0 {
        return CompatReport { outcome: CompatOutcome::Incompatible, nodes: 0 };
    }
    let single = |part: &TripletSet| {
        if caterpillars_only {
            caterpillar_compatible(part, &label_set).expect("labels cover the set")
        } else {
            aho_build(part, &label_set).expect("labels cover the set")
        }
    };
    if let Some(t) = single(r) {
        return CompatReport { outcome: CompatOutcome::Compatible(vec![t]), nodes: 1 };
    }
    if k == 1 {
        return CompatReport { outcome: CompatOutcome::Incompatible, nodes: 1 };
    }
    let names: Vec<Label> = label_set.iter().cloned().collect();
    let idx: BTreeMap<&Label, usize> = names.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let trips: Vec<[usize; 3]> = r.iter().map(|t| [idx[&t.a], idx[&t.b], idx[&t.c]]).collect();
    if !caterpillars_only {
        return dense_tree_search(r, &names, &trips, k, node_limit);
    }
    let mut s = Partition::new(names.len(), trips, k, node_limit.unwrap_or(u64::MAX));
    let res = s.search();
    let nodes = s.nodes;
    let outcome = match res {
        Err(()) => CompatOutcome::Unknown,
        Ok(false) => CompatOutcome::Incompatible,
        Ok(true) => {
            let mut trees = Vec::new();
            for b in 0..k {
                let part: TripletSet =
                    r.iter().zip(&s.assign).filter(|(_, a)| **a == Some(b)).map(|(t, _)| t.clone()).collect();
                if !part.is_empty() {
                    trees.push(single(&part).expect("block is feasible"));
                }
            }
            CompatOutcome::Compatible(trees)
        }
    };
    CompatReport { outcome, nodes }
}

/// Triplet-to-block assignment with forward checking; a block stays a
/// caterpillar while its triplet digraph is acyclic, tracked by incremental
/// reachability.
struct Partition {
    n: usize,
    words: usize,
    trips: Vec<[usize; 3]>,
    k: usize,
    assign: Vec<Option<usize>>,
    blocks: Vec<Vec<usize>>,
    dom: Vec<u64>,
    reach: Vec<Vec<u64>>,
    rivals: Vec<Vec<usize>>,
    nodes: u64,
    limit: u64,
}

impl Partition {
    fn new(n: usize, trips: Vec<[usize; 3]>, k: usize, limit: u64) -> Self {
        assert!(k <= 64, "at most 64 blocks");
        let words = n.div_ceil(64);
        let mut by_set: BTreeMap<[usize; 3], Vec<usize>> = BTreeMap::new();
        for (i, t) in trips.iter().enumerate() {
            let mut s = *t;
            s.sort_unstable();
            by_set.entry(s).or_default().push(i);
        }
        let mut rivals = vec![Vec::new(); trips.len()];
        for group in by_set.values() {
            for &i in group {
                rivals[i] = group.iter().copied().filter(|&j| j != i).collect();
            }
        }
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Partition {
            n,
            words,
            assign: vec![None; trips.len()],
            dom: vec![full; trips.len()],
            trips,
            k,
            blocks: vec![Vec::new(); k],
            reach: vec![vec![0; n * words]; k],
            rivals,
            nodes: 0,
            limit,
        }
    }

    fn reaches(&self, b: usize, from: usize, to: usize) -> bool {
        self.reach[b][from * self.words + to / 64] >> (to % 64) & 1 == 1
    }

    fn feasible(&self, b: usize, t: usize) -> bool {
        if self.rivals[t].iter().any(|&j| self.assign[j] == Some(b)) {
            return false;
        }
        let [a, x, c] = self.trips[t];
        !self.reaches(b, a, c) && !self.reaches(b, x, c)
    }

    fn add_arcs(&mut self, b: usize, t: usize) {
        let [a, x, c] = self.trips[t];
        let w = self.words;
        let mut gain = vec![0u64; w];
        for v in [a, x] {
            gain[v / 64] |= 1 << (v % 64);
            for (g, r) in gain.iter_mut().zip(&self.reach[b][v * w..(v + 1) * w]) {
                *g |= r;
            }
        }
        for u in 0..self.n {
            if u == c || self.reaches(b, u, c) {
                for (r, g) in self.reach[b][u * w..(u + 1) * w].iter_mut().zip(&gain) {
                    *r |= g;
                }
            }
        }
    }

    /// Ok(true) when a full assignment was found (left in `assign`),
    /// Err on budget exhaustion.
    fn search(&mut self) -> Result<bool, ()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(());
        }
        let mut pick = None;
        let mut best = u32::MAX;
        for t in 0..self.trips.len() {
            if self.assign[t].is_none() {
                let d = self.dom[t].count_ones();
                if d < best {
                    best = d;
                    pick = Some(t);
                }
            }
        }
        let Some(t) = pick else { return Ok(true) };
        if best == 0 {
            return Ok(false);
        }
        let mut seen_empty = false;
        for b in 0..self.k {
            if self.dom[t] >> b & 1 == 0 {
                continue;
            }
            if self.blocks[b].is_empty() {
                if seen_empty {
                    continue;
                }
                seen_empty = true;
            }
            let saved_reach = self.reach[b].clone();
            self.assign[t] = Some(b);
            self.blocks[b].push(t);
            self.add_arcs(b, t);
            let mut trail = Vec::new();
            let mut wiped = false;
            for u in 0..self.trips.len() {
                if self.assign[u].is_none() && self.dom[u] >> b & 1 == 1 && !self.feasible(b, u) {
                    self.dom[u] &= !(1 << b);
                    trail.push(u);
                    if self.dom[u] == 0 {
                        wiped = true;
                        break;
                    }
                }
            }
            if !wiped && self.search()? {
                return Ok(true);
            }
            for u in trail {
                self.dom[u] |= 1 << b;
            }
            self.blocks[b].pop();
            self.assign[t] = None;
            self.reach[b] = saved_reach;
        }
        Ok(false)
    }
}

/// Trees as dense triplet assignments: per slot exactly one triplet on every
/// leaf triple, closed under `ab|c, bc|d => ab|d, ac|d`. The first input
/// triplet is pinned to slot 0.
fn dense_tree_search(
    r: &TripletSet,
    names: &[Label],
    trips: &[[usize; 3]],
    k: usize,
    limit: Option<u64>,
) -> CompatReport {
    let n = names.len();
    let index = FullIndex::new(n).expect("at least three labels");
    let m = index.len();
    let var = |s: usize, a: usize, b: usize, c: usize| s * m + index.var(a + 1, b + 1, c + 1);
    let mut cnf = Cnf::new(k * m);
    for s in 0..k {
        for i in 0..index.triples() {
            let x = [0, 1, 2].map(|o| s * m + 3 * i + o);
            cnf.add(x.iter().map(|&v| Lit::pos(v)).collect());
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                cnf.add(vec![Lit::neg(x[p]), Lit::neg(x[q])]);
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        if a == b || a == c || a == d || b == c || b == d || c == d {
                            continue;
                        }
                        let (x, y) = (Lit::neg(var(s, a, b, c)), Lit::neg(var(s, b, c, d)));
                        cnf.add(vec![x, y, Lit::pos(var(s, a, b, d))]);
                        cnf.add(vec![x, y, Lit::pos(var(s, a, c, d))]);
                    }
                }
            }
        }
    }
    for (i, &[a, b, c]) in trips.iter().enumerate() {
        let slots = if i == 0 { 0..1 } else { 0..k };
        cnf.add(slots.map(|s| Lit::pos(var(s, a, b, c))).collect());
    }
    let label_set: BTreeSet<Label> = names.iter().cloned().collect();
    let (sat, conflicts) = solve_cdcl(&cnf, limit);
    let outcome = match sat {
        SatOutcome::Unknown => CompatOutcome::Unknown,
        SatOutcome::Unsat => CompatOutcome::Incompatible,
        SatOutcome::Sat(value) => {
            let mut trees = Vec::new();
            for s in 0..k {
                let dense: TripletSet = (0..m)
                    .filter(|&i| value[s * m + i])
                    .map(|i| {
                        let t = index.triplet(i);
                        let name = |l: &Label| names[l.as_str().parse::<usize>().expect("numeric") - 1].clone();
                        Triplet::new(name(&t.a), name(&t.b), name(&t.c)).expect("distinct")
                    })
                    .collect();
                let tree = aho_build(&dense, &label_set).expect("labels cover the set").expect("closed dense set");
                if r.iter().any(|t| tree.displays(t).expect("labels present")) {
                    trees.push(tree);
                }
            }
            CompatOutcome::Compatible(trees)
        }
    };
    CompatReport { outcome, nodes: conflicts }
}

/// A 2-colouring with acyclic colour classes, or `None` when there is none.
pub fn two_dicolorable(d: &Digraph) -> Option<BTreeMap<Label, u8>> {
    two_dicolorable_with(d, None).expect("no budget")
}

pub fn two_dicolorable_with(d: &Digraph, node_limit: Option<u64>) -> Result<Option<BTreeMap<Label, u8>>, PhyloError> {
    let (names, adj) = d.indexed();
    let n = names.len();
    let mut pairs = vec![Vec::new(); n];
    for u in 0..n {
        for &v in &adj[u] {
            if adj[v].contains(&u) {
                pairs[u].push(v);
            }
        }
    }
    // Visit vertices so that 2-cycle partners follow each other closely.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nb: Vec<usize> = pairs[u].iter().chain(&adj[u]).copied().collect();
            nb.sort_unstable();
            for v in nb {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let mut col = vec![u8::MAX; n];
    let mut nodes = 0u64;
    let limit = node_limit.unwrap_or(u64::MAX);
    let found = dicolor_rec(0, &order, &adj, &pairs, &mut col, &mut nodes, limit)?;
    Ok(found.then(|| names.into_iter().zip(col).collect()))
}

fn dicolor_rec(
    i: usize,
    order: &[usize],
    adj: &[Vec<usize>],
    pairs: &[Vec<usize>],
    col: &mut [u8],
    nodes: &mut u64,
    limit: u64,
) -> Result<bool, PhyloError> {
    if i == order.len() {
        return Ok(true);
    }
    *nodes += 1;
    if *nodes > limit {
        return Err(PhyloError::Budget(limit));
    }
    let v = order[i];
    let colors: &[u8] = if i == 0 { &[0] } else { &[0, 1] };
    for &c in colors {
        if pairs[v].iter().any(|&u| col[u] == c) {
            continue;
        }
        col[v] = c;
        if !on_mono_cycle(v, adj, col) && dicolor_rec(i + 1, order, adj, pairs, col, nodes, limit)? {
            return Ok(true);
        }
        col[v] = u8::MAX;
    }
    Ok(false)
}

/// Whether `v` lies on a directed cycle inside its own colour class.
fn on_mono_cycle(v: usize, adj: &[Vec<usize>], col: &[u8]) -> bool {
    let c = col[v];
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = adj[v].iter().copied().filter(|&u| col[u] == c).collect();
    while let Some(u) = stack.pop() {
        if u == v {
            return true;
        }
        if std::mem::replace(&mut seen[u], true) {
            continue;
        }
        stack.extend(adj[u].iter().copied().filter(|&w| col[w] == c));
    }
    false
}

/// Checks a colouring: every vertex coloured, every class acyclic.
pub fn is_dicoloring(d: &Digraph, col: &BTreeMap<Label, u8>) -> bool {
    let mut classes: BTreeMap<u8, BTreeSet<Label>> = BTreeMap::new();
    for v in d.vertices() {
        match col.get(v) {
            Some(c) => {
                classes.entry(*c).or_default().insert(v.clone());
            }
            None => return false,
        }
    }
    classes.values().all(|s| d.induced(s).is_acyclic())
}
