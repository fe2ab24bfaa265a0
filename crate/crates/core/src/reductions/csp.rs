//! Reductions among the two-ordering CSPs.
//!
//! Source variables keep their identifiers in every target instance: target
//! names are the source names followed by the gadget names.

use std::collections::{HashMap, HashSet};

use crate::orderings::{implied_constraints, pi_family, satisfies, Constraint, Instance, LinearOrdering, VarId};
use crate::solver::Solution;

use super::{fresh, Parts, ReductionError};

/// A transformed instance with its block sizes.
#[derive(Debug, Clone)]
pub struct CspReduction {
    pub target: Instance,
    pub parts: Parts,
}

fn expect_source(i: &Instance, pi: usize, k: usize) -> Result<(), ReductionError> {
    if i.pi.index() != pi || i.k != k {
        return Err(ReductionError::WrongSource {
            expected: format!("{k}-{}", pi_family(pi)?),
            got: format!("{}-{}", i.k, i.pi),
        });
    }
    Ok(())
}

struct Builder {
    names: Vec<String>,
    lookup: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn from_source(src: &Instance) -> Self {
        let names = src.names().to_vec();
        let lookup = names.iter().enumerate().map(|(i, n)| (n.clone(), VarId(i as u32))).collect();
        Builder { names, lookup, constraints: Vec::new() }
    }

    fn fresh(&mut self, reduction: &str, index: impl std::fmt::Display, role: &str) -> Result<VarId, ReductionError> {
        let name = fresh(reduction, index, role);
        if self.lookup.contains_key(&name) {
            return Err(ReductionError::Collision(name));
        }
        let v = VarId(self.names.len() as u32);
        self.lookup.insert(name.clone(), v);
        self.names.push(name);
        Ok(v)
    }

    fn add(&mut self, a: VarId, b: VarId, c: VarId) {
        self.constraints.push(Constraint(a, b, c));
    }

    fn finish(self, pi: usize, k: usize) -> Result<Instance, ReductionError> {
        Ok(Instance::new(self.names, self.constraints, pi_family(pi)?, k)?)
    }
}

fn ordering(seq: Vec<VarId>) -> LinearOrdering {
    LinearOrdering::new(seq).expect("construction yields a permutation")
}

fn source_ordering(src: &Instance, alpha: &LinearOrdering) -> Result<(), ReductionError> {
    let sol = Solution::new(vec![alpha.clone()]);
    if alpha.len() != src.num_vars()
        || !crate::solver::check_solution(src, &sol).map_err(|_| ReductionError::NotASolution)?
    {
        return Err(ReductionError::NotASolution);
    }
    Ok(())
}

fn source_solution(src: &Instance, sol: &Solution) -> Result<(LinearOrdering, LinearOrdering), ReductionError> {
    if sol.is_empty()
        || sol.len() > 2
        || !crate::solver::check_solution(src, sol).map_err(|_| ReductionError::NotASolution)?
    {
        return Err(ReductionError::NotASolution);
    }
    let a = sol.orderings()[0].clone();
    let b = sol.orderings().get(1).cloned().unwrap_or_else(|| a.clone());
    Ok((a, b))
}

fn restrict_to_source(src: &Instance, o: &LinearOrdering) -> LinearOrdering {
    let m = src.num_vars();
    ordering(o.iter().copied().filter(|v| v.index() < m).collect())
}

/// Inserts, around each anchor, the listed elements immediately before and
/// after it.
fn insert_around(
    base: &[VarId],
    before: &HashMap<VarId, Vec<VarId>>,
    after: &HashMap<VarId, Vec<VarId>>,
) -> LinearOrdering {
    let mut seq = Vec::new();
    for v in base {
        if let Some(xs) = before.get(v) {
            seq.extend(xs);
        }
        seq.push(*v);
        if let Some(xs) = after.get(v) {
            seq.extend(xs);
        }
    }
    ordering(seq)
}

fn increasing(o: &LinearOrdering, a: VarId, b: VarId) -> bool {
    o.position(&a).expect("in domain") < o.position(&b).expect("in domain")
}

// ---------------------------------------------------------------------------
// 1-Π5 → 2-Π0

/// Each betweenness constraint becomes its two monotone readings.
pub fn reduce_1pi5_to_2pi0(src: &Instance) -> Result<CspReduction, ReductionError> {
    expect_source(src, 5, 1)?;
    let mut b = Builder::from_source(src);
    for c in src.constraints() {
        b.add(c.0, c.1, c.2);
        b.add(c.2, c.1, c.0);
    }
    let mut parts = Parts::default();
    parts.push("pairs", 2 * src.constraints().len());
    Ok(CspReduction { target: b.finish(0, 2)?, parts })
}

pub fn lift_1pi5_to_2pi0(src: &Instance, alpha: &LinearOrdering) -> Result<Solution, ReductionError> {
    source_ordering(src, alpha)?;
    Ok(Solution::new(vec![alpha.clone(), alpha.reversal()]))
}

pub fn back_1pi5_to_2pi0(src: &Instance, target: &Solution) -> Result<LinearOrdering, ReductionError> {
    let alpha = target.orderings().first().ok_or(ReductionError::NotASolution)?.clone();
    source_ordering(src, &alpha)?;
    Ok(alpha)
}

// ---------------------------------------------------------------------------
// 2-Π0 → 2-Π1

const PI1_TAG: &str = "2pi1";

/// Two fresh variables and five constraints per source constraint.
pub fn reduce_2pi0_to_2pi1(src: &Instance) -> Result<CspReduction, ReductionError> {
    expect_source(src, 0, 2)?;
    let mut b = Builder::from_source(src);
    for (i, c) in src.constraints().iter().enumerate() {
        let d = b.fresh(PI1_TAG, i, "d")?;
        let e = b.fresh(PI1_TAG, i, "e")?;
        let (v1, v2, v3) = (c.0, c.1, c.2);
        b.add(v1, v2, d);
        b.add(v2, v3, e);
        b.add(e, v1, v2);
        b.add(d, v1, v2);
        b.add(v1, e, d);
    }
    let mut parts = Parts::default();
    parts.push("fresh", 2 * src.constraints().len());
    parts.push("constraints", 5 * src.constraints().len());
    Ok(CspReduction { target: b.finish(1, 2)?, parts })
}

/// `α' = γ'‖α‖γ` and `β' = γ‖β‖γ'`, where `γ` lists the fresh variables of
/// constraints satisfied by `α` and `γ'` the rest, each ascending.
pub fn lift_2pi0_to_2pi1(src: &Instance, target: &Instance, sol: &Solution) -> Result<Solution, ReductionError> {
    let (alpha, beta) = source_solution(src, sol)?;
    let pi0 = src.pi;
    let mut w = Vec::new();
    let mut w_rest = Vec::new();
    for (i, c) in src.constraints().iter().enumerate() {
        let d = var(target, PI1_TAG, i, "d")?;
        let e = var(target, PI1_TAG, i, "e")?;
        if satisfies(pi0, &alpha, c)? {
            w.extend([d, e]);
        } else {
            w_rest.extend([d, e]);
        }
    }
    w.sort();
    w_rest.sort();
    let a = [&w_rest[..], alpha.as_slice(), &w[..]].concat();
    let b = [&w[..], beta.as_slice(), &w_rest[..]].concat();
    Ok(Solution::new(vec![ordering(a), ordering(b)]))
}

pub fn back_2pi0_to_2pi1(src: &Instance, target: &Solution) -> Result<Solution, ReductionError> {
    let sol = Solution::new(target.orderings().iter().map(|o| restrict_to_source(src, o)).collect());
    source_solution(src, &sol)?;
    Ok(sol)
}

fn var(target: &Instance, reduction: &str, index: impl std::fmt::Display, role: &str) -> Result<VarId, ReductionError> {
    let name = fresh(reduction, index, role);
    target.var(&name).ok_or(ReductionError::Structure(format!("missing gadget variable {name}")))
}

// ---------------------------------------------------------------------------
// 1-Π9 → 2-Π4

pub fn reduce_1pi9_to_2pi4(src: &Instance) -> Result<CspReduction, ReductionError> {
    expect_source(src, 9, 1)?;
    let mut b = Builder::from_source(src);
    for c in src.constraints() {
        b.add(c.1, c.0, c.2);
        b.add(c.1, c.2, c.0);
    }
    let mut parts = Parts::default();
    parts.push("pairs", 2 * src.constraints().len());
    Ok(CspReduction { target: b.finish(4, 2)?, parts })
}

pub fn lift_1pi9_to_2pi4(src: &Instance, alpha: &LinearOrdering) -> Result<Solution, ReductionError> {
    source_ordering(src, alpha)?;
    Ok(Solution::new(vec![alpha.clone(), alpha.reversal()]))
}

pub fn back_1pi9_to_2pi4(src: &Instance, target: &Solution) -> Result<LinearOrdering, ReductionError> {
    let alpha = target.orderings().first().ok_or(ReductionError::NotASolution)?.clone();
    source_ordering(src, &alpha)?;
    Ok(alpha)
}

// ---------------------------------------------------------------------------
// 1-Π5 → 2-Π5

const PI5_TAG: &str = "2pi5";

fn pi5_core(target: &Instance) -> Result<[VarId; 5], ReductionError> {
    let mut out = [VarId(0); 5];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = var(target, PI5_TAG, "core", &(i + 1).to_string())?;
    }
    Ok(out)
}

/// Betweenness gadget on five fresh variables plus the coupling blocks.
pub fn reduce_1pi5_to_2pi5(src: &Instance) -> Result<CspReduction, ReductionError> {
    expect_source(src, 5, 1)?;
    let pi5 = pi_family(5)?;
    let mut b = Builder::from_source(src);
    let mut core = [VarId(0); 5];
    for (i, slot) in core.iter_mut().enumerate() {
        *slot = b.fresh(PI5_TAG, "core", &(i + 1).to_string())?;
    }
    let [g1, g2, g3, g4, g5] = core;
    let mut parts = Parts::default();

    let gamma = ordering(vec![g1, g2, g3, g4, g5]);
    let gamma2 = ordering(vec![g5, g2, g3, g4, g1]);
    let mut c1: Vec<Constraint> = implied_constraints(&gamma, pi5);
    c1.extend(implied_constraints(&gamma2, pi5));
    let c1: Vec<Constraint> = dedup(c1);
    parts.push("C1", c1.len());
    for c in c1 {
        b.add(c.0, c.1, c.2);
    }

    let mut de = Vec::new();
    for i in 0..src.constraints().len() {
        de.push((b.fresh(PI5_TAG, i, "d")?, b.fresh(PI5_TAG, i, "e")?));
    }
    for (c, &(d, e)) in src.constraints().iter().zip(&de) {
        b.add(c.0, d, c.2);
        b.add(c.0, e, c.2);
        b.add(d, c.1, e);
    }
    parts.push("C2", 3 * de.len());
    for v in src.vars() {
        b.add(g3, v, g4);
        b.add(g4, v, g5);
        b.add(g1, v, g2);
        b.add(g1, v, g3);
    }
    parts.push("C3", 4 * src.num_vars());
    for &(d, e) in &de {
        for x in [d, e] {
            b.add(g2, x, g3);
            b.add(g1, x, g2);
            b.add(g4, x, g5);
            b.add(g3, x, g5);
        }
    }
    parts.push("C4", 8 * de.len());
    Ok(CspReduction { target: b.finish(5, 2)?, parts })
}

fn dedup(cs: Vec<Constraint>) -> Vec<Constraint> {
    let mut seen = HashSet::new();
    cs.into_iter().filter(|c| seen.insert(*c)).collect()
}

/// `α' = (1,2,3,4,5)‖δ` and `β' = (5,2)‖δ|D‖(3)‖α‖(4,1)`, where `δ` places
/// each constraint's fresh pair on either side of its middle variable.
pub fn lift_1pi5_to_2pi5(
    src: &Instance,
    target: &Instance,
    alpha: &LinearOrdering,
) -> Result<Solution, ReductionError> {
    source_ordering(src, alpha)?;
    let [g1, g2, g3, g4, g5] = pi5_core(target)?;
    let mut before: HashMap<VarId, Vec<VarId>> = HashMap::new();
    let mut after: HashMap<VarId, Vec<VarId>> = HashMap::new();
    for (i, c) in src.constraints().iter().enumerate() {
        let d = var(target, PI5_TAG, i, "d")?;
        let e = var(target, PI5_TAG, i, "e")?;
        let (lo, hi) = if increasing(alpha, c.0, c.1) { (d, e) } else { (e, d) };
        before.entry(c.1).or_default().push(lo);
        after.entry(c.1).or_default().insert(0, hi);
    }
    let delta = insert_around(alpha.as_slice(), &before, &after);
    let m = src.num_vars();
    let delta_d: Vec<VarId> = delta.iter().copied().filter(|v| v.index() >= m).collect();
    let a = [&[g1, g2, g3, g4, g5][..], delta.as_slice()].concat();
    let b = [&[g5, g2][..], &delta_d[..], &[g3][..], alpha.as_slice(), &[g4, g1][..]].concat();
    Ok(Solution::new(vec![ordering(a), ordering(b)]))
}

/// The member whose gadget restriction is `γ` or its reversal, restricted to
/// the source variables.
pub fn back_1pi5_to_2pi5(src: &Instance, target: &Instance, sol: &Solution) -> Result<LinearOrdering, ReductionError> {
    let core = pi5_core(target)?;
    let gamma = ordering(core.to_vec());
    let gamma_rev = gamma.reversal();
    let member = sol
        .orderings()
        .iter()
        .find(|o| {
            let r = o.restrict(core.iter()).expect("core in domain");
            r == gamma || r == gamma_rev
        })
        .ok_or_else(|| ReductionError::Structure("no member preserves the first gadget ordering".into()))?;
    let alpha = restrict_to_source(src, member);
    source_ordering(src, &alpha)?;
    Ok(alpha)
}

// ---------------------------------------------------------------------------
// 2-Π1 → 2-Π6

const PI6_TAG: &str = "2pi6";

fn pi6_core(target: &Instance) -> Result<[VarId; 3], ReductionError> {
    Ok([var(target, PI6_TAG, "core", "2")?, var(target, PI6_TAG, "core", "3")?, var(target, PI6_TAG, "core", "4")?])
}

/// One Π6 gadget copy per source variable (the variable playing the role of
/// the gadget's first element) and three constraints per source constraint.
pub fn reduce_2pi1_to_2pi6(src: &Instance) -> Result<CspReduction, ReductionError> {
    expect_source(src, 1, 2)?;
    let pi6 = pi_family(6)?;
    let mut b = Builder::from_source(src);
    let g2 = b.fresh(PI6_TAG, "core", "2")?;
    let g3 = b.fresh(PI6_TAG, "core", "3")?;
    let g4 = b.fresh(PI6_TAG, "core", "4")?;
    let mut c1 = Vec::new();
    for v in src.vars() {
        c1.extend(implied_constraints(&ordering(vec![v, g2, g3, g4]), pi6));
        c1.extend(implied_constraints(&ordering(vec![g2, g4, v, g3]), pi6));
    }
    let c1 = dedup(c1);
    let mut parts = Parts::default();
    parts.push("C1", c1.len());
    for c in c1 {
        b.add(c.0, c.1, c.2);
    }
    for c in src.constraints() {
        b.add(c.0, c.1, c.2);
        b.add(c.0, c.2, c.1);
        b.add(c.0, c.1, g3);
    }
    parts.push("C2", 3 * src.constraints().len());
    Ok(CspReduction { target: b.finish(6, 2)?, parts })
}

/// `α' = α‖(2,3,4)` and `β' = (2,4)‖β‖(3)`.
pub fn lift_2pi1_to_2pi6(src: &Instance, target: &Instance, sol: &Solution) -> Result<Solution, ReductionError> {
    let (alpha, beta) = source_solution(src, sol)?;
    let [g2, g3, g4] = pi6_core(target)?;
    let a = [alpha.as_slice(), &[g2, g3, g4][..]].concat();
    let b = [&[g2, g4][..], beta.as_slice(), &[g3][..]].concat();
    Ok(Solution::new(vec![ordering(a), ordering(b)]))
}

pub fn back_2pi1_to_2pi6(src: &Instance, sol: &Solution) -> Result<Solution, ReductionError> {
    let out = Solution::new(sol.orderings().iter().map(|o| restrict_to_source(src, o)).collect());
    source_solution(src, &out)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// 1-Π5 → 2-Π9

const PI9_TAG: &str = "2pi9";
const PI9_ROLES: [&str; 4] = ["1", "2", "3", "5"];

fn pi9_fresh(target: &Instance, i: usize) -> Result<[VarId; 4], ReductionError> {
    let mut out = [VarId(0); 4];
    for (slot, role) in out.iter_mut().zip(PI9_ROLES) {
        *slot = var(target, PI9_TAG, i, role)?;
    }
    Ok(out)
}

/// A private non-betweenness gadget per source constraint, with the
/// constraint's variables in the roles of the gadget's elements 4, 6 and 7.
pub fn reduce_1pi5_to_2pi9(src: &Instance) -> Result<CspReduction, ReductionError> {
    expect_source(src, 5, 1)?;
    let pi9 = pi_family(9)?;
    let mut b = Builder::from_source(src);
    let mut generated = 0;
    for (i, c) in src.constraints().iter().enumerate() {
        let mut f = [VarId(0); 4];
        for (slot, role) in f.iter_mut().zip(PI9_ROLES) {
            *slot = b.fresh(PI9_TAG, i, role)?;
        }
        let [x1, x2, x3, x5] = f;
        let (v1, v2, v3) = (c.0, c.1, c.2);
        let gamma = ordering(vec![x1, x2, x3, v1, x5, v2, v3]);
        let delta = ordering(vec![x2, x5, v3, x3, x1, v2, v1]);
        let mut cs = implied_constraints(&gamma, pi9);
        cs.extend(implied_constraints(&delta, pi9));
        generated += cs.len();
        for c in cs {
            b.add(c.0, c.1, c.2);
        }
    }
    let mut parts = Parts::default();
    parts.push("fresh", 4 * src.constraints().len());
    parts.push("generated", generated);
    Ok(CspReduction { target: b.finish(9, 2)?, parts })
}

/// Inserts each gadget's fresh variables next to one anchor so that `α'`
/// restricts to `γ^i` (or its reversal) and `β'` to `δ^i` (or its reversal).
pub fn lift_1pi5_to_2pi9(
    src: &Instance,
    target: &Instance,
    alpha: &LinearOrdering,
) -> Result<Solution, ReductionError> {
    source_ordering(src, alpha)?;
    let mut a_before: HashMap<VarId, Vec<VarId>> = HashMap::new();
    let mut a_after: HashMap<VarId, Vec<VarId>> = HashMap::new();
    let mut b_before: HashMap<VarId, Vec<VarId>> = HashMap::new();
    let mut b_after: HashMap<VarId, Vec<VarId>> = HashMap::new();
    for (i, c) in src.constraints().iter().enumerate() {
        let [x1, x2, x3, x5] = pi9_fresh(target, i)?;
        let (v1, v3) = (c.0, c.2);
        if increasing(alpha, c.0, c.1) {
            // 1 2 3 v1 5 v2 v3  and  v1 v2 1 3 v3 5 2
            a_before.entry(v1).or_default().extend([x1, x2, x3]);
            a_after.entry(v1).or_default().push(x5);
            b_before.entry(v3).or_default().extend([x1, x3]);
            b_after.entry(v3).or_default().extend([x5, x2]);
        } else {
            // v3 v2 5 v1 3 2 1  and  2 5 v3 3 1 v2 v1
            a_before.entry(v1).or_default().push(x5);
            a_after.entry(v1).or_default().extend([x3, x2, x1]);
            b_before.entry(v3).or_default().extend([x2, x5]);
            b_after.entry(v3).or_default().extend([x3, x1]);
        }
    }
    let a = insert_around(alpha.as_slice(), &a_before, &a_after);
    let b = insert_around(alpha.as_slice(), &b_before, &b_after);
    Ok(Solution::new(vec![a, b]))
}

/// Either member restricted to the source variables.
pub fn back_1pi5_to_2pi9(src: &Instance, sol: &Solution) -> Result<LinearOrdering, ReductionError> {
    let member = sol.orderings().first().ok_or(ReductionError::NotASolution)?;
    let alpha = restrict_to_source(src, member);
    source_ordering(src, &alpha)?;
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::check_solution;

    fn inst(pi: usize, k: usize, vars: &[&str], cs: &[[&str; 3]]) -> Instance {
        Instance::from_named(vars, cs, pi_family(pi).unwrap(), k).unwrap()
    }

    #[test]
    fn pi0_pair_shape() {
        let src = inst(5, 1, &["a", "b", "c"], &[["a", "b", "c"]]);
        let r = reduce_1pi5_to_2pi0(&src).unwrap();
        let got: Vec<_> = r.target.constraints().iter().map(|c| c.map(|v| r.target.name(*v).to_string())).collect();
        assert_eq!(
            got,
            vec![
                Constraint::new("a".into(), "b".into(), "c".into()).unwrap(),
                Constraint::new("c".into(), "b".into(), "a".into()).unwrap()
            ]
        );
        let empty = inst(5, 1, &["a"], &[]);
        assert!(reduce_1pi5_to_2pi0(&empty).unwrap().target.constraints().is_empty());
        assert!(reduce_1pi5_to_2pi0(&src.with_k(2).unwrap()).is_err());
    }

    #[test]
    fn pi4_pair_shape() {
        let src = inst(9, 1, &["a", "b", "c"], &[["a", "b", "c"]]);
        let r = reduce_1pi9_to_2pi4(&src).unwrap();
        let t = &r.target;
        let got: Vec<String> =
            t.constraints().iter().map(|c| format!("{}{}{}", t.name(c.0), t.name(c.1), t.name(c.2))).collect();
        assert_eq!(got, ["bac", "bca"]);
    }

    #[test]
    fn pi1_counts_and_lift() {
        let src = inst(0, 2, &["a", "b", "c", "d"], &[["a", "b", "c"], ["d", "c", "a"]]);
        let r = reduce_2pi0_to_2pi1(&src).unwrap();
        assert_eq!(r.target.num_vars(), 4 + 4);
        assert_eq!(r.target.constraints().len(), 10);
        let sol = Solution::new(vec![
            src.ordering(&["a", "b", "c", "d"]).unwrap(),
            src.ordering(&["d", "c", "a", "b"]).unwrap(),
        ]);
        let lifted = lift_2pi0_to_2pi1(&src, &r.target, &sol).unwrap();
        assert!(check_solution(&r.target, &lifted).unwrap());
        assert!(check_solution(&src, &back_2pi0_to_2pi1(&src, &lifted).unwrap()).unwrap());
    }

    #[test]
    fn pi5_blocks_and_lift() {
        let src = inst(5, 1, &["a", "b", "c", "d"], &[["a", "b", "c"], ["b", "c", "d"]]);
        let r = reduce_1pi5_to_2pi5(&src).unwrap();
        assert_eq!(r.parts.get("C2"), Some(6));
        assert_eq!(r.parts.get("C3"), Some(16));
        assert_eq!(r.parts.get("C4"), Some(16));
        assert_eq!(r.target.num_vars(), 4 + 4 + 5);
        let alpha = src.ordering(&["d", "c", "b", "a"]).unwrap();
        let lifted = lift_1pi5_to_2pi5(&src, &r.target, &alpha).unwrap();
        assert!(check_solution(&r.target, &lifted).unwrap());
        assert_eq!(back_1pi5_to_2pi5(&src, &r.target, &lifted).unwrap(), alpha);
    }

    #[test]
    fn pi6_blocks_and_lift() {
        let src = inst(1, 2, &["a", "b", "c"], &[["a", "b", "c"], ["c", "a", "b"]]);
        let r = reduce_2pi1_to_2pi6(&src).unwrap();
        assert_eq!(r.parts.get("C2"), Some(6));
        assert_eq!(r.target.num_vars(), 6);
        let sol = Solution::new(vec![src.ordering(&["a", "b", "c"]).unwrap(), src.ordering(&["c", "b", "a"]).unwrap()]);
        let lifted = lift_2pi1_to_2pi6(&src, &r.target, &sol).unwrap();
        assert!(check_solution(&r.target, &lifted).unwrap());
        assert!(check_solution(&src, &back_2pi1_to_2pi6(&src, &lifted).unwrap()).unwrap());
    }

    #[test]
    fn pi9_gadget_per_constraint() {
        let src = inst(5, 1, &["a", "b", "c"], &[["a", "b", "c"]]);
        let r = reduce_1pi5_to_2pi9(&src).unwrap();
        assert_eq!(r.target.num_vars(), 7);
        assert_eq!(r.parts.get("generated"), Some(2 * 4 * 35));
        for alpha in [src.ordering(&["a", "b", "c"]).unwrap(), src.ordering(&["c", "b", "a"]).unwrap()] {
            let lifted = lift_1pi5_to_2pi9(&src, &r.target, &alpha).unwrap();
            assert!(check_solution(&r.target, &lifted).unwrap());
            assert_eq!(back_1pi5_to_2pi9(&src, &lifted).unwrap(), alpha);
        }
    }

    #[test]
    fn lifts_reject_non_solutions() {
        let src = inst(5, 1, &["a", "b", "c"], &[["a", "b", "c"]]);
        let bad = src.ordering(&["b", "a", "c"]).unwrap();
        assert!(matches!(lift_1pi5_to_2pi0(&src, &bad), Err(ReductionError::NotASolution)));
    }

    #[test]
    fn reserved_names_collide() {
        let src = inst(0, 2, &["g:2pi1:0:d", "b", "c"], &[["g:2pi1:0:d", "b", "c"]]);
        assert!(matches!(reduce_2pi0_to_2pi1(&src), Err(ReductionError::Collision(_))));
    }
}
