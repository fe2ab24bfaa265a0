//! Two small complete SAT engines over a shared clause form: a DPLL search
//! with a fixed branching order and a pruning hook, and a clause-learning
//! solver for free-form instances.

pub type Var = usize;

/// Literal encoding `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(v: Var) -> Lit {
        Lit((v as u32) << 1)
    }

    pub fn neg(v: Var) -> Lit {
        Lit(((v as u32) << 1) | 1)
    }

    pub fn var(self) -> Var {
        (self.0 >> 1) as usize
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    Sat(Vec<bool>),
    Unsat,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(vars: usize) -> Self {
        Cnf { vars, clauses: Vec::new() }
    }

    pub fn add(&mut self, mut c: Vec<Lit>) {
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        self.clauses.push(c);
    }
}

/// Partial assignment seen by the pruning hook: `None` is unassigned.
pub type Partial<'a> = &'a [Option<bool>];

pub struct Search<'a> {
    clauses: &'a [Vec<Lit>],
    watches: Vec<Vec<usize>>,
    watched: Vec<[Lit; 2]>,
    value: Vec<Option<bool>>,
    trail: Vec<Var>,
    qhead: usize,
    pub nodes: u64,
}

impl<'a> Search<'a> {
    pub fn new(cnf: &'a Cnf) -> Self {
        let mut s = Search {
            clauses: &cnf.clauses,
            watches: vec![Vec::new(); 2 * cnf.vars],
            watched: Vec::with_capacity(cnf.clauses.len()),
            value: vec![None; cnf.vars],
            trail: Vec::new(),
            qhead: 0,
            nodes: 0,
        };
        for (i, c) in cnf.clauses.iter().enumerate() {
            let w = if c.len() >= 2 { [c[0], c[1]] } else { [c[0], c[0]] };
            s.watched.push(w);
            s.watches[w[0].not().0 as usize].push(i);
            if c.len() >= 2 {
                s.watches[w[1].not().0 as usize].push(i);
            }
        }
        s
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l.var()].map(|v| v != l.is_neg())
    }

    fn assign(&mut self, l: Lit) -> bool {
        match self.lit_value(l) {
            Some(v) => v,
            None => {
                self.value[l.var()] = Some(!l.is_neg());
                self.trail.push(l.var());
                true
            }
        }
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let v = self.trail.pop().expect("non-empty trail");
            self.value[v] = None;
        }
        self.qhead = self.qhead.min(len);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let v = self.trail[self.qhead];
            self.qhead += 1;
            let falsified = if self.value[v] == Some(true) { Lit::neg(v) } else { Lit::pos(v) };
            let key = falsified.not().0 as usize;
            let list = std::mem::take(&mut self.watches[key]);
            let mut keep = Vec::with_capacity(list.len());
            let mut ok = true;
            for (pos, &ci) in list.iter().enumerate() {
                if !ok {
                    keep.extend_from_slice(&list[pos..]);
                    break;
                }
                let clause = &self.clauses[ci];
                if clause.len() == 1 {
                    keep.push(ci);
                    ok = false;
                    continue;
                }
                let mut w = self.watched[ci];
                if w[0] == falsified {
                    w.swap(0, 1);
                }
                if self.lit_value(w[0]) == Some(true) {
                    self.watched[ci] = w;
                    keep.push(ci);
                    continue;
                }
                let replacement =
                    clause.iter().copied().find(|&l| l != w[0] && l != w[1] && self.lit_value(l) != Some(false));
                match replacement {
                    Some(l) => {
                        w[1] = l;
                        self.watched[ci] = w;
                        self.watches[l.not().0 as usize].push(ci);
                    }
                    None => {
                        self.watched[ci] = w;
                        keep.push(ci);
                        if !self.assign(w[0]) {
                            ok = false;
                        }
                    }
                }
            }
            self.watches[key] = keep;
            if !ok {
                return false;
            }
        }
        true
    }

    /// Complete search. `order` lists `(var, first value)` in branching
    /// priority; variables not listed are never branched on and must be
    /// forced. `prune` rejects a propagated partial assignment.
    pub fn solve(
        &mut self,
        assumptions: &[Lit],
        order: &[(Var, bool)],
        mut prune: impl FnMut(Partial) -> bool,
        budget: Option<u64>,
    ) -> SatOutcome {
        for (i, c) in self.clauses.iter().enumerate() {
            if c.len() == 1 && !self.assign(c[0]) {
                return SatOutcome::Unsat;
            }
            let _ = i;
        }
        for &l in assumptions {
            if !self.assign(l) {
                return SatOutcome::Unsat;
            }
        }
        // (trail length before decision, decision literal, flipped)
        let mut decisions: Vec<(usize, Lit, bool)> = Vec::new();
        let mut cursor = 0usize;
        loop {
            let consistent = self.propagate() && !prune(&self.value);
            if !consistent {
                loop {
                    let Some((len, lit, flipped)) = decisions.pop() else {
                        return SatOutcome::Unsat;
                    };
                    self.undo_to(len);
                    if !flipped {
                        decisions.push((len, lit.not(), true));
                        self.assign(lit.not());
                        break;
                    }
                }
                cursor = 0;
                continue;
            }
            while cursor < order.len() && self.value[order[cursor].0].is_some() {
                cursor += 1;
            }
            let Some(&(v, first)) = order.get(cursor) else {
                if self.value.iter().any(Option::is_none) {
                    return SatOutcome::Unknown;
                }
                return SatOutcome::Sat(self.value.iter().map(|v| v.unwrap_or(false)).collect());
            };
            self.nodes += 1;
            if budget.is_some_and(|b| self.nodes > b) {
                return SatOutcome::Unknown;
            }
            let lit = if first { Lit::pos(v) } else { Lit::neg(v) };
            decisions.push((self.trail.len(), lit, false));
            self.assign(lit);
        }
    }
}

const UNDEF: u8 = 2;

fn val(value: &[u8], l: Lit) -> u8 {
    match value[l.var()] {
        UNDEF => UNDEF,
        v => v ^ (l.0 as u8 & 1),
    }
}

/// Max-heap of variables keyed by activity.
struct Heap {
    items: Vec<Var>,
    pos: Vec<usize>,
}

impl Heap {
    const ABSENT: usize = usize::MAX;

    fn contains(&self, v: Var) -> bool {
        self.pos[v] != Self::ABSENT
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.items[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.items[parent]] >= act[v] {
                break;
            }
            self.items[i] = self.items[parent];
            self.pos[self.items[i]] = i;
            i = parent;
        }
        self.items[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.items[i];
        loop {
            let mut child = 2 * i + 1;
            if child >= self.items.len() {
                break;
            }
            if child + 1 < self.items.len() && act[self.items[child + 1]] > act[self.items[child]] {
                child += 1;
            }
            if act[self.items[child]] <= act[v] {
                break;
            }
            self.items[i] = self.items[child];
            self.pos[self.items[i]] = i;
            i = child;
        }
        self.items[i] = v;
        self.pos[v] = i;
    }

    fn insert(&mut self, v: Var, act: &[f64]) {
        if !self.contains(v) {
            self.items.push(v);
            self.pos[v] = self.items.len() - 1;
            self.up(self.items.len() - 1, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<Var> {
        let top = *self.items.first()?;
        let last = self.items.pop().expect("non-empty");
        self.pos[top] = Self::ABSENT;
        if !self.items.is_empty() {
            self.items[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(mut i: u64) -> u64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

/// Clause-learning search with first-UIP learning, activity branching,
/// phase saving and Luby restarts. `budget` caps the number of conflicts;
/// the conflict count is returned alongside the outcome.
pub fn solve_cdcl(cnf: &Cnf, budget: Option<u64>) -> (SatOutcome, u64) {
    let mut s = Cdcl::new(cnf.vars);
    for c in &cnf.clauses {
        if !s.add_clause(c.clone()) {
            return (SatOutcome::Unsat, 0);
        }
    }
    let out = s.run(budget);
    (out, s.conflicts)
}

struct Cdcl {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    inc: f64,
    heap: Heap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    conflicts: u64,
}

impl Cdcl {
    fn new(vars: usize) -> Self {
        let activity = vec![0.0; vars];
        let mut heap = Heap { items: Vec::with_capacity(vars), pos: vec![Heap::ABSENT; vars] };
        for v in 0..vars {
            heap.insert(v, &activity);
        }
        Cdcl {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * vars],
            value: vec![UNDEF; vars],
            level: vec![0; vars],
            reason: vec![None; vars],
            trail: Vec::new(),
            lim: Vec::new(),
            qhead: 0,
            activity,
            inc: 1.0,
            heap,
            phase: vec![false; vars],
            seen: vec![false; vars],
            conflicts: 0,
        }
    }

    /// Adds a clause at level 0; false when the formula became unsatisfiable.
    fn add_clause(&mut self, c: Vec<Lit>) -> bool {
        match c.len() {
            0 => false,
            1 => match val(&self.value, c[0]) {
                0 => false,
                1 => true,
                _ => {
                    self.enqueue(c[0], None);
                    true
                }
            },
            _ => {
                let ci = self.clauses.len();
                self.watches[c[0].0 as usize].push(ci);
                self.watches[c[1].0 as usize].push(ci);
                self.clauses.push(c);
                true
            }
        }
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        self.value[v] = u8::from(!l.is_neg());
        self.level[v] = self.lim.len();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Index of a falsified clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let falsified = self.trail[self.qhead].not();
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[falsified.0 as usize]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let c = &mut self.clauses[ci];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                if val(&self.value, c[0]) == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                if let Some(k) = (2..c.len()).find(|&k| val(&self.value, c[k]) != 0) {
                    c.swap(1, k);
                    self.watches[c[1].0 as usize].push(ci);
                    continue;
                }
                ws[j] = ci;
                j += 1;
                let first = c[0];
                if val(&self.value, first) == 0 {
                    conflict = Some(ci);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(ci));
                }
            }
            ws.truncate(j);
            self.watches[falsified.0 as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: Var) {
        self.activity[v] += self.inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.inc *= 1e-100;
        }
        if self.heap.contains(v) {
            self.heap.up(self.heap.pos[v], &self.activity);
        }
    }

    /// First-UIP clause with the asserting literal first and a literal of
    /// the backjump level second, and that level.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, usize) {
        let current = self.lim.len();
        let mut learnt = vec![Lit(0)];
        let mut open = 0usize;
        let mut pivot: Option<Lit> = None;
        let mut idx = self.trail.len();
        let mut ci = conflict;
        loop {
            let skip = usize::from(pivot.is_some());
            for k in skip..self.clauses[ci].len() {
                let q = self.clauses[ci][k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= current {
                        open += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var()] = false;
            open -= 1;
            pivot = Some(p);
            if open == 0 {
                break;
            }
            ci = self.reason[p.var()].expect("implied literal has a reason");
        }
        learnt[0] = pivot.expect("conflict above level 0").not();
        let redundant = |s: &Self, q: Lit| match s.reason[q.var()] {
            None => false,
            Some(r) => s.clauses[r][1..].iter().all(|x| s.seen[x.var()] || s.level[x.var()] == 0),
        };
        let keep: Vec<bool> = learnt.iter().enumerate().map(|(k, &q)| k == 0 || !redundant(self, q)).collect();
        for q in &learnt[1..] {
            self.seen[q.var()] = false;
        }
        let mut learnt: Vec<Lit> = learnt.into_iter().zip(keep).filter(|(_, k)| *k).map(|(q, _)| q).collect();
        let mut back = 0;
        if learnt.len() > 1 {
            let best = (1..learnt.len()).max_by_key(|&k| self.level[learnt[k].var()]).expect("two literals");
            learnt.swap(1, best);
            back = self.level[learnt[1].var()];
        }
        (learnt, back)
    }

    fn cancel_until(&mut self, lvl: usize) {
        if self.lim.len() <= lvl {
            return;
        }
        let keep = self.lim[lvl];
        for l in self.trail.drain(keep..).rev() {
            let v = l.var();
            self.value[v] = UNDEF;
            self.reason[v] = None;
            self.phase[v] = !l.is_neg();
            self.heap.insert(v, &self.activity);
        }
        self.lim.truncate(lvl);
        self.qhead = self.trail.len();
    }

    fn run(&mut self, budget: Option<u64>) -> SatOutcome {
        let mut restarts = 0u64;
        let mut since_restart = 0u64;
        loop {
            if let Some(ci) = self.propagate() {
                self.conflicts += 1;
                since_restart += 1;
                if self.lim.is_empty() {
                    return SatOutcome::Unsat;
                }
                if budget.is_some_and(|b| self.conflicts > b) {
                    return SatOutcome::Unknown;
                }
                let (learnt, back) = self.analyze(ci);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let ci = self.clauses.len();
                    self.add_clause(learnt);
                    self.enqueue(first, Some(ci));
                }
                self.inc /= 0.95;
                continue;
            }
            if since_restart >= 100 * luby(restarts) {
                restarts += 1;
                since_restart = 0;
                self.cancel_until(0);
            }
            let next = loop {
                match self.heap.pop(&self.activity) {
                    Some(v) if self.value[v] != UNDEF => continue,
                    other => break other,
                }
            };
            let Some(v) = next else {
                return SatOutcome::Sat(self.value.iter().map(|&x| x == 1).collect());
            };
            self.lim.push(self.trail.len());
            let l = if self.phase[v] { Lit::pos(v) } else { Lit::neg(v) };
            self.enqueue(l, None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(cnf: &Cnf) -> bool {
        (0u32..1 << cnf.vars)
            .any(|m| cnf.clauses.iter().all(|c| c.iter().any(|l| ((m >> l.var()) & 1 == 1) != l.is_neg())))
    }

    #[test]
    fn agrees_with_truth_tables() {
        let mut seed = 7u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..400 {
            let vars = 6;
            let mut cnf = Cnf::new(vars);
            for _ in 0..(next() % 20) {
                let len = 1 + (next() % 3) as usize;
                let c = (0..len)
                    .map(|_| {
                        let v = (next() % vars as u64) as usize;
                        if next() % 2 == 0 {
                            Lit::pos(v)
                        } else {
                            Lit::neg(v)
                        }
                    })
                    .collect();
                cnf.add(c);
            }
            let order: Vec<(Var, bool)> = (0..vars).map(|v| (v, true)).collect();
            let out = Search::new(&cnf).solve(&[], &order, |_| false, None);
            match &out {
                SatOutcome::Sat(a) => {
                    assert!(cnf.clauses.iter().all(|c| c.iter().any(|l| a[l.var()] != l.is_neg())));
                }
                SatOutcome::Unsat => assert!(!brute(&cnf)),
                SatOutcome::Unknown => panic!("no budget given"),
            }
            assert_eq!(matches!(out, SatOutcome::Sat(_)), brute(&cnf));
            let (learned, _) = solve_cdcl(&cnf, None);
            if let SatOutcome::Sat(a) = &learned {
                assert!(cnf.clauses.iter().all(|c| c.iter().any(|l| a[l.var()] != l.is_neg())));
            }
            assert_eq!(matches!(learned, SatOutcome::Sat(_)), brute(&cnf));
        }
    }

    fn pigeonhole(holes: usize) -> Cnf {
        let pigeons = holes + 1;
        let v = |p: usize, h: usize| p * holes + h;
        let mut cnf = Cnf::new(pigeons * holes);
        for p in 0..pigeons {
            cnf.add((0..holes).map(|h| Lit::pos(v(p, h))).collect());
        }
        for h in 0..holes {
            for p in 0..pigeons {
                for q in p + 1..pigeons {
                    cnf.add(vec![Lit::neg(v(p, h)), Lit::neg(v(q, h))]);
                }
            }
        }
        cnf
    }

    #[test]
    fn learning_refutes_pigeonhole() {
        for holes in 1..=6 {
            assert_eq!(solve_cdcl(&pigeonhole(holes), None).0, SatOutcome::Unsat);
        }
        assert_eq!(solve_cdcl(&pigeonhole(9), Some(10)), (SatOutcome::Unknown, 11));
        assert_eq!(solve_cdcl(&Cnf { vars: 1, clauses: vec![vec![]] }, None).0, SatOutcome::Unsat);
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn budget_reports_unknown() {
        let cnf = Cnf::new(10);
        let order: Vec<(Var, bool)> = (0..10).map(|v| (v, true)).collect();
        let out = Search::new(&cnf).solve(&[], &order, |p| p.iter().filter(|x| x.is_some()).count() == 10, Some(50));
        assert_eq!(out, SatOutcome::Unknown);
    }
}
