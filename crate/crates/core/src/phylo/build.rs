use std::collections::{BTreeMap, BTreeSet};

use crate::orderings::LinearOrdering;

use super::digraph::Digraph;
use super::tree::{Label, RootedTree};
use super::triplet::TripletSet;
use super::PhyloError;

/// Nested form produced by index-level BUILD.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Shape {
    Leaf(usize),
    Node(Vec<Shape>),
}

impl Shape {
    fn min_leaf(&self) -> usize {
        match self {
            Shape::Leaf(i) => *i,
            Shape::Node(ch) => ch.iter().map(Shape::min_leaf).min().expect("non-empty node"),
        }
    }

    /// Binarizes multifurcations as caterpillars over children sorted by
    /// smallest leaf.
    pub(crate) fn to_tree(&self, names: &[Label]) -> RootedTree {
        match self {
            Shape::Leaf(i) => RootedTree::leaf(names[*i].clone()),
            Shape::Node(ch) => {
                let mut ch: Vec<&Shape> = ch.iter().collect();
                ch.sort_by_key(|s| s.min_leaf());
                let mut t = ch.last().expect("non-empty").to_tree(names);
                for s in ch.iter().rev().skip(1) {
                    t = RootedTree::join(&s.to_tree(names), &t).expect("disjoint");
                }
                t
            }
        }
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let n = self.0[x];
            self.0[x] = r;
            x = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// BUILD over leaf indices `0..n`. Components are processed in ascending
/// smallest-index order.
pub(crate) fn build_indexed(n: usize, trips: &[[usize; 3]]) -> Option<Shape> {
    let set: Vec<usize> = (0..n).collect();
    let refs: Vec<&[usize; 3]> = trips.iter().collect();
    let mut local = vec![usize::MAX; n];
    build_rec(&set, &refs, &mut local)
}

fn build_rec(set: &[usize], trips: &[&[usize; 3]], local: &mut [usize]) -> Option<Shape> {
    match set.len() {
        0 => return None,
        1 => return Some(Shape::Leaf(set[0])),
        _ => {}
    }
    for (i, &x) in set.iter().enumerate() {
        local[x] = i;
    }
    let mut dsu = Dsu((0..set.len()).collect());
    for t in trips {
        dsu.union(local[t[0]], local[t[1]]);
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &x) in set.iter().enumerate() {
        comps.entry(dsu.find(i)).or_default().push(x);
    }
    if comps.len() == 1 {
        return None;
    }
    for (ci, members) in comps.values().enumerate() {
        for &x in members {
            local[x] = ci;
        }
    }
    let mut per: Vec<Vec<&[usize; 3]>> = vec![Vec::new(); comps.len()];
    for t in trips {
        let ca = local[t[0]];
        if local[t[2]] == ca {
            per[ca].push(t);
        }
    }
    let mut children = Vec::with_capacity(comps.len());
    for (ci, members) in comps.values().enumerate() {
        children.push(build_rec(members, &per[ci], local)?);
    }
    Some(Shape::Node(children))
}

fn index_labels(labels: &BTreeSet<Label>) -> (Vec<Label>, BTreeMap<&Label, usize>) {
    let names: Vec<Label> = labels.iter().cloned().collect();
    let idx = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    (names, idx)
}

fn index_triplets(r: &TripletSet, idx: &BTreeMap<&Label, usize>) -> Result<Vec<[usize; 3]>, PhyloError> {
    r.iter()
        .map(|t| {
            let get = |l: &Label| idx.get(l).copied().ok_or_else(|| PhyloError::UnknownLabel(l.to_string()));
            Ok([get(&t.a)?, get(&t.b)?, get(&t.c)?])
        })
        .collect()
}

/// A binary tree on `labels` displaying all of `r`, or `None` when `r` is
/// incompatible.
pub fn aho_build(r: &TripletSet, labels: &BTreeSet<Label>) -> Result<Option<RootedTree>, PhyloError> {
    if labels.is_empty() {
        return Err(PhyloError::Empty);
    }
    let (names, idx) = index_labels(labels);
    let trips = index_triplets(r, &idx)?;
    Ok(build_indexed(names.len(), &trips).map(|s| s.to_tree(&names)))
}

/// Arcs from each witness to both members of its cherry.
pub fn triplet_digraph(r: &TripletSet) -> Digraph {
    let mut d = Digraph::new();
    for t in r {
        d.add_arc(t.c.clone(), t.a.clone()).expect("distinct labels");
        d.add_arc(t.c.clone(), t.b.clone()).expect("distinct labels");
    }
    d
}

/// A caterpillar on `labels` displaying all of `r`, read off a topological
/// order of the triplet digraph; `None` when that digraph has a cycle.
pub fn caterpillar_compatible(r: &TripletSet, labels: &BTreeSet<Label>) -> Result<Option<RootedTree>, PhyloError> {
    if labels.is_empty() {
        return Err(PhyloError::Empty);
    }
    let mut d = triplet_digraph(r);
    for l in d.vertices().clone() {
        if !labels.contains(&l) {
            return Err(PhyloError::UnknownLabel(l.to_string()));
        }
    }
    for l in labels {
        d.add_vertex(l.clone());
    }
    Ok(d.topological_order().map(|order| RootedTree::caterpillar(&order).expect("non-empty")))
}

/// Leaves of a caterpillar from the root down; the cherry comes last with its
/// smaller label first.
pub fn ordering_of(cat: &RootedTree) -> Result<LinearOrdering<Label>, PhyloError> {
    if cat.num_leaves() >= 2 && !cat.is_caterpillar() {
        return Err(PhyloError::NotCaterpillar);
    }
    let mut seq = Vec::with_capacity(cat.num_leaves());
    let mut cur = cat.root();
    loop {
        if let Some(l) = cat.label(cur) {
            seq.push(l.clone());
            break;
        }
        let ch = cat.children(cur);
        let (leafs, inner): (Vec<_>, Vec<_>) = ch.into_iter().partition(|&c| cat.is_leaf(c));
        if inner.is_empty() {
            let mut pair: Vec<Label> = leafs.iter().map(|&c| cat.label(c).expect("leaf").clone()).collect();
            pair.sort();
            seq.extend(pair);
            break;
        }
        seq.push(cat.label(leafs[0]).expect("leaf").clone());
        cur = inner[0];
    }
    Ok(LinearOrdering::new(seq).expect("leaf labels are unique"))
}

/// Inverse of [`ordering_of`]: the first element sits next to the root.
pub fn caterpillar_of(alpha: &LinearOrdering<Label>) -> Result<RootedTree, PhyloError> {
    RootedTree::caterpillar(alpha.as_slice())
}
