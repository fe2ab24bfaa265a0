use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::tree::Label;
use super::PhyloError;

/// Rooted triplet `ab|c`; `c` is the witness. Stored with `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triplet {
    pub a: Label,
    pub b: Label,
    pub c: Label,
}

impl Triplet {
    pub fn new(a: Label, b: Label, c: Label) -> Result<Self, PhyloError> {
        if a == b || a == c || b == c {
            return Err(PhyloError::RepeatedLabel(format!("{a} {b} | {c}")));
        }
        Ok(if a < b { Triplet { a, b, c } } else { Triplet { a: b, b: a, c } })
    }

    /// Accepts `a b | c`, `a,b|c`, and the compact `ab|c` for one-character
    /// labels.
    pub fn parse(s: &str) -> Result<Self, PhyloError> {
        let bad = || PhyloError::TripletSyntax(s.to_string());
        let (left, right) = s.split_once('|').ok_or_else(bad)?;
        let right: Vec<&str> = right.split_whitespace().collect();
        let [c] = right[..] else { return Err(bad()) };
        let parts: Vec<&str> =
            left.split(|ch: char| ch.is_whitespace() || ch == ',').filter(|p| !p.is_empty()).collect();
        let (a, b) = match parts[..] {
            [a, b] => (a.to_string(), b.to_string()),
            [ab] if ab.chars().count() == 2 => {
                let mut it = ab.chars();
                (it.next().expect("two chars").to_string(), it.next().expect("two chars").to_string())
            }
            _ => return Err(bad()),
        };
        Triplet::new(Label::new(a)?, Label::new(b)?, Label::new(c)?)
    }

    pub fn labels(&self) -> [&Label; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.a == *l || self.b == *l || self.c == *l
    }

    /// The two other orientations on the same three leaves.
    pub fn rivals(&self) -> [Triplet; 2] {
        [
            Triplet::new(self.a.clone(), self.c.clone(), self.b.clone()).expect("distinct"),
            Triplet::new(self.b.clone(), self.c.clone(), self.a.clone()).expect("distinct"),
        ]
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let short = self.labels().iter().all(|l| l.as_str().chars().count() == 1);
        if short {
            write!(f, "{}{}|{}", self.a, self.b, self.c)
        } else {
            write!(f, "{} {} | {}", self.a, self.b, self.c)
        }
    }
}

/// A set of canonical triplets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripletSet {
    triplets: BTreeSet<Triplet>,
}

impl TripletSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses compact or spaced triplets separated by commas, semicolons or
    /// newlines, e.g. `13|4, 14|2`.
    pub fn parse_list(s: &str) -> Result<Self, PhyloError> {
        s.split([',', ';', '\n']).map(str::trim).filter(|p| !p.is_empty()).map(Triplet::parse).collect()
    }

    /// The triplet file format: one `a b | c` per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self, PhyloError> {
        let mut out = TripletSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let t = Triplet::parse(line).map_err(|e| PhyloError::Line { line: i + 1, msg: e.to_string() })?;
            out.insert(t);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        self.triplets.iter().map(|t| format!("{} {} | {}\n", t.a, t.b, t.c)).collect()
    }

    pub fn insert(&mut self, t: Triplet) -> bool {
        self.triplets.insert(t)
    }

    pub fn contains(&self, t: &Triplet) -> bool {
        self.triplets.contains(t)
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triplet> + '_ {
        self.triplets.iter()
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.triplets.iter().flat_map(|t| t.labels().into_iter().cloned()).collect()
    }

    pub fn union(&self, other: &TripletSet) -> TripletSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    /// Triplets whose three labels all lie in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<Label>) -> TripletSet {
        self.iter().filter(|t| t.labels().iter().all(|l| keep.contains(*l))).cloned().collect()
    }
}

impl FromIterator<Triplet> for TripletSet {
    fn from_iter<I: IntoIterator<Item = Triplet>>(iter: I) -> Self {
        TripletSet { triplets: iter.into_iter().collect() }
    }
}

impl Extend<Triplet> for TripletSet {
    fn extend<I: IntoIterator<Item = Triplet>>(&mut self, iter: I) {
        self.triplets.extend(iter)
    }
}

impl IntoIterator for TripletSet {
    type Item = Triplet;
    type IntoIter = std::collections::btree_set::IntoIter<Triplet>;
    fn into_iter(self) -> Self::IntoIter {
        self.triplets.into_iter()
    }
}

impl<'a> IntoIterator for &'a TripletSet {
    type Item = &'a Triplet;
    type IntoIter = std::collections::btree_set::Iter<'a, Triplet>;
    fn into_iter(self) -> Self::IntoIter {
        self.triplets.iter()
    }
}

impl fmt::Display for TripletSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.triplets.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}
