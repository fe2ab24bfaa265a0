//! Variables, linear orderings, the eleven ternary permutation families and
//! the constraint instances built on top of them.
//!
//! A permutation `π ∈ S₃` is written as the sequence of symbols it places at
//! positions 1, 2, 3, so `132` maps position 1 to symbol 1, position 2 to
//! symbol 3 and position 3 to symbol 2. A constraint `(v₁, v₂, v₃)` is
//! satisfied by an ordering `α` under `π` when
//! `α(v_{π(1)}) < α(v_{π(2)}) < α(v_{π(3)})`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderingError {
    #[error("pi family index {0} is out of range 0..=10")]
    PiIndex(usize),
    #[error("variable {0} is not ordered by this ordering")]
    Missing(String),
    #[error("variable {0} appears twice in an ordering")]
    Duplicate(String),
    #[error("restriction set is not a subset of the ordering's domain ({0} missing)")]
    NotSubset(String),
    #[error("concatenated orderings share variable {0}")]
    Overlap(String),
    #[error("constraint repeats variable {0}")]
    RepeatedVariable(String),
    #[error("budget k must be at least 1")]
    ZeroBudget,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Dense identifier of a variable inside one [`Instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// An element of S₃ as the symbols placed at positions 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(pub [u8; 3]);

/// S₃ in lexicographic order; a family is a 6-bit mask over this table.
pub const S3: [Perm; 6] =
    [Perm([1, 2, 3]), Perm([1, 3, 2]), Perm([2, 1, 3]), Perm([2, 3, 1]), Perm([3, 1, 2]), Perm([3, 2, 1])];

impl Perm {
    pub fn parse(s: &str) -> Option<Perm> {
        let b = s.as_bytes();
        if b.len() != 3 {
            return None;
        }
        let p = Perm([b[0].wrapping_sub(b'0'), b[1].wrapping_sub(b'0'), b[2].wrapping_sub(b'0')]);
        S3.contains(&p).then_some(p)
    }

    pub fn index(self) -> usize {
        S3.iter().position(|&p| p == self).expect("valid permutation")
    }

    /// The pattern seen by the reversed ordering.
    pub fn reverse(self) -> Perm {
        Perm([self.0[2], self.0[1], self.0[0]])
    }

    /// Pattern induced by three distinct positions of `(v₁, v₂, v₃)`.
    pub fn of_positions(p: [usize; 3]) -> Perm {
        let mut sym = [1u8, 2, 3];
        sym.sort_by_key(|&s| p[(s - 1) as usize]);
        Perm(sym)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

const PI_TABLE: [&[&str]; 11] = [
    &["123"],
    &["123", "132"],
    &["123", "213", "231"],
    &["123", "231", "312", "321"],
    &["123", "231"],
    &["123", "321"],
    &["123", "132", "231"],
    &["123", "231", "312"],
    &["132", "213", "312", "321"],
    &["132", "213", "231", "312"],
    &["132", "213", "231", "312", "321"],
];

/// One of the eleven ternary permutation families Π₀ … Π₁₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PiFamily {
    index: u8,
    mask: u8,
}

/// Families for which `{α, ᾱ}` solves every instance with two orderings.
pub const TRIVIAL_FOR_TWO: [usize; 5] = [2, 3, 7, 8, 10];

pub fn pi_family(i: usize) -> Result<PiFamily, OrderingError> {
    let perms = PI_TABLE.get(i).ok_or(OrderingError::PiIndex(i))?;
    let mask = perms.iter().map(|s| 1u8 << Perm::parse(s).expect("table entry").index()).fold(0, |a, b| a | b);
    Ok(PiFamily { index: i as u8, mask })
}

impl PiFamily {
    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn mask(self) -> u8 {
        self.mask
    }

    pub fn perms(self) -> Vec<Perm> {
        S3.iter().copied().filter(|p| self.contains(*p)).collect()
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn contains(self, p: Perm) -> bool {
        self.mask & (1 << p.index()) != 0
    }

    /// True when the family is mapped onto itself by reversing the ordering.
    pub fn reversal_closed(self) -> bool {
        self.perms().into_iter().all(|p| self.contains(p.reverse()))
    }

    pub fn accepts_positions(self, p: [usize; 3]) -> bool {
        self.contains(Perm::of_positions(p))
    }
}

impl fmt::Display for PiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pi{}", self.index)
    }
}

/// An ordered triple of pairwise distinct variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Constraint<T = VarId>(pub T, pub T, pub T);

impl<T: Clone + Eq + fmt::Debug> Constraint<T> {
    pub fn new(a: T, b: T, c: T) -> Result<Self, OrderingError> {
        if a == b || a == c {
            return Err(OrderingError::RepeatedVariable(format!("{a:?}")));
        }
        if b == c {
            return Err(OrderingError::RepeatedVariable(format!("{b:?}")));
        }
        Ok(Constraint(a, b, c))
    }

    pub fn vars(&self) -> [&T; 3] {
        [&self.0, &self.1, &self.2]
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Constraint<U> {
        Constraint(f(&self.0), f(&self.1), f(&self.2))
    }
}

/// A bijection between a variable set and positions `1..=m`.
///
/// Stores the sequence and its inverse; equality and ordering only look at
/// the sequence.
#[derive(Debug, Clone)]
pub struct LinearOrdering<T = VarId> {
    seq: Vec<T>,
    pos: HashMap<T, usize>,
}

impl<T: Eq + Hash> PartialEq for LinearOrdering<T> {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}

impl<T: Eq + Hash> Eq for LinearOrdering<T> {}

impl<T: Ord + Hash> PartialOrd for LinearOrdering<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord + Hash> Ord for LinearOrdering<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.seq.cmp(&other.seq)
    }
}

impl<T: Hash> Hash for LinearOrdering<T> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.seq.hash(state)
    }
}

impl<T: Clone + Eq + Hash + fmt::Debug> LinearOrdering<T> {
    pub fn new(seq: Vec<T>) -> Result<Self, OrderingError> {
        let mut pos = HashMap::with_capacity(seq.len());
        for (i, v) in seq.iter().enumerate() {
            if pos.insert(v.clone(), i).is_some() {
                return Err(OrderingError::Duplicate(format!("{v:?}")));
            }
        }
        Ok(LinearOrdering { seq, pos })
    }

    pub fn empty() -> Self {
        LinearOrdering { seq: Vec::new(), pos: HashMap::new() }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.seq
    }

    pub fn into_vec(self) -> Vec<T> {
        self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn contains(&self, v: &T) -> bool {
        self.pos.contains_key(v)
    }

    /// 1-based position, `α(v)`.
    pub fn position(&self, v: &T) -> Option<usize> {
        self.pos.get(v).map(|p| p + 1)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.seq.iter()
    }

    pub fn domain(&self) -> HashSet<T> {
        self.seq.iter().cloned().collect()
    }

    pub fn reversal(&self) -> Self {
        let seq: Vec<T> = self.seq.iter().rev().cloned().collect();
        let n = seq.len();
        let pos = self.pos.iter().map(|(v, &p)| (v.clone(), n - 1 - p)).collect();
        LinearOrdering { seq, pos }
    }

    /// Keeps the relative order of `s`; written α − (V − S).
    pub fn restrict<'a, I>(&self, s: I) -> Result<Self, OrderingError>
    where
        I: IntoIterator<Item = &'a T>,
        T: 'a,
    {
        let keep: HashSet<&T> = s.into_iter().collect();
        if let Some(v) = keep.iter().find(|v| !self.contains(v)) {
            return Err(OrderingError::NotSubset(format!("{v:?}")));
        }
        let seq = self.seq.iter().filter(|v| keep.contains(v)).cloned().collect();
        LinearOrdering::new(seq)
    }

    /// α ‖ β: every variable of `self` before every variable of `other`.
    pub fn concat(&self, other: &Self) -> Result<Self, OrderingError> {
        if let Some(v) = other.seq.iter().find(|v| self.contains(v)) {
            return Err(OrderingError::Overlap(format!("{v:?}")));
        }
        let mut seq = self.seq.clone();
        seq.extend(other.seq.iter().cloned());
        LinearOrdering::new(seq)
    }

    pub fn map<U, F>(&self, mut f: F) -> Result<LinearOrdering<U>, OrderingError>
    where
        U: Clone + Eq + Hash + fmt::Debug,
        F: FnMut(&T) -> U,
    {
        LinearOrdering::new(self.seq.iter().map(&mut f).collect())
    }

    /// Positions of the three constraint variables (0-based).
    pub fn positions(&self, c: &Constraint<T>) -> Result<[usize; 3], OrderingError> {
        let get = |v: &T| self.pos.get(v).copied().ok_or_else(|| OrderingError::Missing(format!("{v:?}")));
        Ok([get(&c.0)?, get(&c.1)?, get(&c.2)?])
    }

    /// The pattern `π` with `α(v_{π(1)}) < α(v_{π(2)}) < α(v_{π(3)})`.
    pub fn pattern(&self, c: &Constraint<T>) -> Result<Perm, OrderingError> {
        Ok(Perm::of_positions(self.positions(c)?))
    }
}

impl<T: Clone + Eq + Hash + fmt::Debug> FromIterator<T> for LinearOrdering<T> {
    /// Panics on duplicates; use [`LinearOrdering::new`] for checked input.
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        LinearOrdering::new(iter.into_iter().collect()).expect("duplicate element in ordering")
    }
}

impl<T: fmt::Display> fmt::Display for LinearOrdering<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.seq.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub fn satisfies<T>(pi: PiFamily, alpha: &LinearOrdering<T>, c: &Constraint<T>) -> Result<bool, OrderingError>
where
    T: Clone + Eq + Hash + fmt::Debug,
{
    Ok(pi.contains(alpha.pattern(c)?))
}

/// C_Π(α): every ordered triple of distinct variables that α Π-satisfies.
pub fn implied_constraints<T>(alpha: &LinearOrdering<T>, pi: PiFamily) -> Vec<Constraint<T>>
where
    T: Clone + Eq + Hash + fmt::Debug,
{
    let s = alpha.as_slice();
    let m = s.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if i != j && i != k && j != k && pi.accepts_positions([i, j, k]) {
                    out.push(Constraint(s[i].clone(), s[j].clone(), s[k].clone()));
                }
            }
        }
    }
    out
}

/// A k-Π instance. Variables are the dense ids `0..names.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    names: Vec<String>,
    lookup: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
    pub pi: PiFamily,
    pub k: usize,
}

impl Instance {
    /// Builds an instance; duplicate constraints are dropped keeping first
    /// occurrences.
    pub fn new(
        names: Vec<String>,
        constraints: Vec<Constraint>,
        pi: PiFamily,
        k: usize,
    ) -> Result<Self, OrderingError> {
        if k == 0 {
            return Err(OrderingError::ZeroBudget);
        }
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if lookup.insert(n.clone(), VarId(i as u32)).is_some() {
                return Err(OrderingError::Duplicate(n.clone()));
            }
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(constraints.len());
        for c in constraints {
            for v in c.vars() {
                if v.index() >= names.len() {
                    return Err(OrderingError::Missing(v.to_string()));
                }
            }
            if c.0 == c.1 || c.0 == c.2 || c.1 == c.2 {
                return Err(OrderingError::RepeatedVariable(names[c.0.index()].clone()));
            }
            if seen.insert(c) {
                kept.push(c);
            }
        }
        Ok(Instance { names, lookup, constraints: kept, pi, k })
    }

    /// Instance over named variables; names are interned in first-occurrence
    /// order of `vars`.
    pub fn from_named<S: AsRef<str>>(
        vars: &[S],
        constraints: &[[S; 3]],
        pi: PiFamily,
        k: usize,
    ) -> Result<Self, OrderingError> {
        let names: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        let lookup: HashMap<&str, VarId> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), VarId(i as u32))).collect();
        let get = |s: &S| lookup.get(s.as_ref()).copied().ok_or_else(|| OrderingError::Missing(s.as_ref().to_string()));
        let cs = constraints
            .iter()
            .map(|[a, b, c]| Ok(Constraint(get(a)?, get(b)?, get(c)?)))
            .collect::<Result<Vec<_>, OrderingError>>()?;
        Instance::new(names.clone(), cs, pi, k)
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len() as u32).map(VarId)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.lookup.get(name).copied()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn with_k(&self, k: usize) -> Result<Self, OrderingError> {
        Instance::new(self.names.clone(), self.constraints.clone(), self.pi, k)
    }

    pub fn with_pi(&self, pi: PiFamily) -> Self {
        let mut out = self.clone();
        out.pi = pi;
        out
    }

    /// Orders by name instead of id.
    pub fn named(&self, alpha: &LinearOrdering) -> LinearOrdering<String> {
        alpha.map(|v| self.name(*v).to_string()).expect("names are unique")
    }

    /// Parses a named ordering over this instance's variables.
    pub fn ordering<S: AsRef<str>>(&self, seq: &[S]) -> Result<LinearOrdering, OrderingError> {
        let ids = seq
            .iter()
            .map(|s| self.var(s.as_ref()).ok_or_else(|| OrderingError::Missing(s.as_ref().to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        LinearOrdering::new(ids)
    }

    /// Ascending-id ordering of all variables.
    pub fn identity_ordering(&self) -> LinearOrdering {
        self.vars().collect()
    }

    /// Applies a bijection on variable ids; names travel with their variables.
    pub fn relabel(&self, perm: &[VarId]) -> Self {
        let mut names = vec![String::new(); self.names.len()];
        for (old, new) in perm.iter().enumerate() {
            names[new.index()] = self.names[old].clone();
        }
        let cs = self.constraints.iter().map(|c| c.map(|v| perm[v.index()])).collect();
        Instance::new(names, cs, self.pi, self.k).expect("relabelling preserves validity")
    }

    pub fn parse(text: &str) -> Result<Self, OrderingError> {
        let err = |line: usize, msg: &str| OrderingError::Parse { line, msg: msg.to_string() };
        let mut pi = None;
        let mut k = None;
        let mut names: Option<Vec<String>> = None;
        let mut raw: Vec<(usize, [String; 3])> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lno = idx + 1;
            let line = line.split('#').next().unwrap_or("");
            let mut toks = line.split_whitespace();
            let Some(head) = toks.next() else { continue };
            let rest: Vec<&str> = toks.collect();
            match head {
                "pi" => {
                    let [i] = rest[..] else { return Err(err(lno, "expected `pi <index>`")) };
                    let i: usize = i.parse().map_err(|_| err(lno, "pi index is not an integer"))?;
                    pi = Some(pi_family(i).map_err(|e| err(lno, &e.to_string()))?);
                }
                "k" => {
                    let [v] = rest[..] else { return Err(err(lno, "expected `k <budget>`")) };
                    k = Some(v.parse::<usize>().map_err(|_| err(lno, "k is not an integer"))?);
                }
                "vars" => {
                    if names.is_some() {
                        return Err(err(lno, "duplicate `vars` line"));
                    }
                    names = Some(rest.iter().map(|s| s.to_string()).collect());
                }
                "c" => {
                    let [a, b, c] = rest[..] else { return Err(err(lno, "expected `c <a> <b> <c>`")) };
                    raw.push((lno, [a.to_string(), b.to_string(), c.to_string()]));
                }
                other => return Err(err(lno, &format!("unknown directive `{other}`"))),
            }
        }
        let pi = pi.ok_or_else(|| err(0, "missing `pi` line"))?;
        let k = k.ok_or_else(|| err(0, "missing `k` line"))?;
        let names = names.ok_or_else(|| err(0, "missing `vars` line"))?;
        let mut lookup = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if lookup.insert(n.as_str(), VarId(i as u32)).is_some() {
                return Err(err(0, &format!("variable `{n}` declared twice")));
            }
        }
        let mut cs = Vec::with_capacity(raw.len());
        for (lno, [a, b, c]) in &raw {
            let get = |s: &String| {
                lookup.get(s.as_str()).copied().ok_or_else(|| err(*lno, &format!("undeclared variable `{s}`")))
            };
            let con = Constraint(get(a)?, get(b)?, get(c)?);
            if con.0 == con.1 || con.0 == con.2 || con.1 == con.2 {
                return Err(err(*lno, "constraint variables must be distinct"));
            }
            cs.push(con);
        }
        Instance::new(names, cs, pi, k).map_err(|e| err(0, &e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("pi {}\nk {}\nvars", self.pi.index(), self.k);
        for n in &self.names {
            s.push(' ');
            s.push_str(n);
        }
        s.push('\n');
        for c in &self.constraints {
            s.push_str(&format!("c {} {} {}\n", self.name(c.0), self.name(c.1), self.name(c.2)));
        }
        s
    }

    /// Variables that occur in at least one constraint.
    pub fn constrained_vars(&self) -> BTreeSet<VarId> {
        self.constraints.iter().flat_map(|c| [c.0, c.1, c.2]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(xs: &[u32]) -> LinearOrdering<u32> {
        LinearOrdering::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn table_rows() {
        let show = |i| pi_family(i).unwrap().perms().iter().map(|p| p.to_string()).collect::<Vec<_>>();
        assert_eq!(show(0), ["123"]);
        assert_eq!(show(1), ["123", "132"]);
        assert_eq!(show(5), ["123", "321"]);
        assert_eq!(show(9), ["132", "213", "231", "312"]);
        assert_eq!(show(10).len(), 5);
        assert!(pi_family(11).is_err());
    }

    #[test]
    fn positions_to_symbols_convention() {
        // α = (a, c, b) with a=1, b=2, c=3, constraint (a, b, c): positions 0, 2, 1.
        let alpha = ord(&[1, 3, 2]);
        let c = Constraint(1, 2, 3);
        assert_eq!(alpha.pattern(&c).unwrap(), Perm([1, 3, 2]));
        // One fixed α against all six single-permutation families.
        let alpha = ord(&[2, 3, 1]);
        let expect = [("123", false), ("132", false), ("213", false), ("231", true), ("312", false), ("321", false)];
        for (p, want) in expect {
            let p = Perm::parse(p).unwrap();
            let c = Constraint(1, 2, 3);
            assert_eq!(alpha.pattern(&c).unwrap() == p, want, "{p}");
        }
        // α(v₂) < α(v₃) < α(v₁) is the pattern 231.
        assert_eq!(Perm::of_positions([2, 0, 1]), Perm([2, 3, 1]));
    }

    #[test]
    fn satisfies_examples() {
        let abc = ord(&[1, 2, 3]);
        let c = Constraint(1, 2, 3);
        assert!(satisfies(pi_family(5).unwrap(), &abc, &c).unwrap());
        assert!(!satisfies(pi_family(0).unwrap(), &abc, &Constraint(3, 2, 1)).unwrap());
        assert!(satisfies(pi_family(1).unwrap(), &ord(&[1, 3, 2]), &c).unwrap());
        assert!(satisfies(pi_family(0).unwrap(), &ord(&[1, 2]), &c).is_err());
    }

    #[test]
    fn reversal_restrict_concat() {
        assert_eq!(ord(&[1, 2, 3]).reversal(), ord(&[3, 2, 1]));
        assert_eq!(ord(&[5, 2, 3, 4, 1]).reversal(), ord(&[1, 4, 3, 2, 5]));
        assert_eq!(ord(&[5, 2, 3, 4, 1]).reversal().position(&5), Some(5));
        assert_eq!(ord(&[1, 2, 3, 4, 5]).restrict(&[2, 4, 5]).unwrap(), ord(&[2, 4, 5]));
        assert_eq!(ord(&[5, 2, 3, 4, 1]).restrict(&[5, 1]).unwrap(), ord(&[5, 1]));
        assert!(ord(&[1, 2]).restrict(&[3]).is_err());
        assert_eq!(ord(&[1, 2]).concat(&ord(&[3, 4])).unwrap(), ord(&[1, 2, 3, 4]));
        assert_eq!(ord(&[5, 2]).concat(&ord(&[3])).unwrap(), ord(&[5, 2, 3]));
        assert_eq!(LinearOrdering::empty().concat(&ord(&[3, 4])).unwrap(), ord(&[3, 4]));
        assert!(ord(&[1, 2]).concat(&ord(&[2])).is_err());
        assert!(LinearOrdering::new(vec![1, 1]).is_err());
    }

    #[test]
    fn implied_counts() {
        let a = ord(&[1, 2, 3]);
        assert_eq!(implied_constraints(&a, pi_family(0).unwrap()), vec![Constraint(1, 2, 3)]);
        assert_eq!(implied_constraints(&ord(&[1, 2, 3, 4, 5]), pi_family(5).unwrap()).len(), 20);
        assert_eq!(implied_constraints(&ord(&[1, 2, 3, 4, 5, 6, 7]), pi_family(9).unwrap()).len(), 140);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let text = "# demo\npi 5\nk 1\nvars a b c d\nc a b c\nc b c d # trailing\nc a b c\n";
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.constraints().len(), 2);
        assert_eq!(Instance::parse(&inst.to_text()).unwrap(), inst);
        match Instance::parse("pi 5\nk 1\nvars a b\nc a b z\n") {
            Err(OrderingError::Parse { line: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(Instance::parse("pi 12\nk 1\nvars a\n").is_err());
        assert!(Instance::parse("pi 1\nk 0\nvars a\n").is_err());
        assert!(Instance::parse("pi 1\nk 1\nvars a b c\nc a a b\n").is_err());
    }
}
