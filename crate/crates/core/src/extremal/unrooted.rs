use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::ExtremalError;
use crate::phylo::{Label, RootedTree, Triplet};

/// Unrooted binary phylogenetic tree; internal vertices have degree 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnrootedTree {
    adj: Vec<Vec<usize>>,
    label: Vec<Option<Label>>,
}

/// A rooting, identified by its root location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Rooting {
    pub root_location: (usize, usize),
}

impl Rooting {
    pub fn new(u: usize, v: usize) -> Self {
        Rooting { root_location: (u.min(v), u.max(v)) }
    }
}

impl UnrootedTree {
    /// Three leaves around one internal vertex.
    pub fn star(a: Label, b: Label, c: Label) -> Result<Self, ExtremalError> {
        let mut t = UnrootedTree { adj: vec![vec![1, 2, 3], vec![0], vec![0], vec![0]], label: vec![None] };
        for l in [a, b, c] {
            if t.leaf_vertex(&l).is_some() {
                return Err(crate::phylo::PhyloError::DuplicateLabel(l.to_string()).into());
            }
            t.label.push(Some(l));
        }
        Ok(t)
    }

    /// Subdivides edge `{u, v}` and hangs a new leaf from the new vertex.
    pub fn attach_leaf(&mut self, u: usize, v: usize, l: Label) -> Result<usize, ExtremalError> {
        if !self.adj.get(u).is_some_and(|a| a.contains(&v)) {
            return Err(ExtremalError::NotAnEdge(format!("{u}-{v}")));
        }
        if self.leaf_vertex(&l).is_some() {
            return Err(crate::phylo::PhyloError::DuplicateLabel(l.to_string()).into());
        }
        let mid = self.adj.len();
        let leaf = mid + 1;
        for (x, y) in [(u, v), (v, u)] {
            let slot = self.adj[x].iter().position(|&z| z == y).expect("edge");
            self.adj[x][slot] = mid;
        }
        self.adj.push(vec![u, v, leaf]);
        self.adj.push(vec![mid]);
        self.label.push(None);
        self.label.push(Some(l));
        Ok(leaf)
    }

    /// Caterpillar shape: the leaves in order along one path, the first two
    /// and last two forming cherries.
    pub fn caterpillar(labels: &[Label]) -> Result<Self, ExtremalError> {
        if labels.len() < 3 {
            return Err(ExtremalError::TooFewLeaves(labels.len()));
        }
        let mut t = UnrootedTree::star(labels[0].clone(), labels[1].clone(), labels[2].clone())?;
        let mut last = t.leaf_vertex(&labels[2]).expect("just added");
        for l in &labels[3..] {
            let p = t.adj[last][0];
            last = t.attach_leaf(p, last, l.clone())?;
        }
        Ok(t)
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.label[v].is_some()
    }

    pub fn label(&self, v: usize) -> Option<&Label> {
        self.label[v].as_ref()
    }

    pub fn leaf_vertex(&self, l: &Label) -> Option<usize> {
        self.label.iter().position(|x| x.as_ref() == Some(l))
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.label.iter().flatten().cloned().collect()
    }

    pub fn order(&self) -> usize {
        self.label.iter().flatten().count()
    }

    /// Edges as `(min, max)` pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.adj.len())
            .flat_map(|u| self.adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_binary(&self) -> bool {
        (0..self.adj.len()).all(|v| if self.is_leaf(v) { self.adj[v].len() == 1 } else { self.adj[v].len() == 3 })
    }

    fn leaves_beyond(&self, from: usize, to: usize, out: &mut BTreeSet<Label>, clusters: &mut Vec<BTreeSet<Label>>) {
        let mut mine = BTreeSet::new();
        if let Some(l) = &self.label[to] {
            mine.insert(l.clone());
        }
        for &w in &self.adj[to] {
            if w != from {
                self.leaves_beyond(to, w, &mut mine, clusters);
            }
        }
        clusters.push(mine.clone());
        out.extend(mine);
    }

    /// The rooted tree obtained by subdividing `r.root_location`.
    pub fn root_at(&self, r: Rooting) -> Result<RootedTree, ExtremalError> {
        let (u, v) = r.root_location;
        if !self.adj.get(u).is_some_and(|a| a.contains(&v)) {
            return Err(ExtremalError::NotAnEdge(format!("{u}-{v}")));
        }
        let mut clusters = Vec::new();
        let mut all = BTreeSet::new();
        self.leaves_beyond(v, u, &mut all, &mut clusters);
        self.leaves_beyond(u, v, &mut all, &mut clusters);
        Ok(RootedTree::from_clusters(&all, &clusters)?)
    }

    /// Unrooted version of a rooted binary tree: the root is suppressed.
    pub fn from_rooted(t: &RootedTree) -> Result<Self, ExtremalError> {
        if t.num_leaves() < 3 {
            return Err(ExtremalError::TooFewLeaves(t.num_leaves()));
        }
        let mut adj = vec![Vec::new(); t.num_nodes()];
        let mut label = vec![None; t.num_nodes()];
        for v in 0..t.num_nodes() {
            let id = crate::phylo::NodeId(v);
            label[v] = t.label(id).cloned();
            if let Some(p) = t.parent(id) {
                adj[v].push(p.0);
                adj[p.0].push(v);
            }
        }
        let root = t.root().0;
        let (a, b) = (adj[root][0], adj[root][1]);
        for (x, y) in [(a, b), (b, a)] {
            let slot = adj[x].iter().position(|&z| z == root).expect("child of root");
            adj[x][slot] = y;
        }
        adj[root].clear();
        let keep: Vec<usize> = (0..adj.len()).filter(|&v| v != root).collect();
        let new_id: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Ok(UnrootedTree {
            adj: keep.iter().map(|&v| adj[v].iter().map(|w| new_id[w]).collect()).collect(),
            label: keep.iter().map(|&v| label[v].clone()).collect(),
        })
    }
}

/// One rooted tree per edge, in edge order.
pub fn rootings_of(t: &UnrootedTree) -> Result<Vec<RootedTree>, ExtremalError> {
    t.edges().into_iter().map(|(u, v)| t.root_at(Rooting::new(u, v))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingVia {
    Cherry,
    Chain,
    Scan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingTriplet {
    pub triplet: Triplet,
    pub via: MissingVia,
}

/// The case split of the counting argument. A cherry `{a, b}` with an
/// unused pendant edge at `a` gives `bc|a`; otherwise three consecutive
/// chain vertices with leaves `a, b, c` and an unused pendant edge at `b`
/// give `ac|b`. Ties go to the smallest leaf labels.
pub fn missing_triplet_constructive(t: &UnrootedTree, rootings: &[Rooting]) -> Option<MissingTriplet> {
    let used: BTreeSet<(usize, usize)> = rootings.iter().map(|r| r.root_location).collect();
    let free_leg = |leaf: usize| {
        let p = t.adj[leaf][0];
        !used.contains(&(leaf.min(p), leaf.max(p)))
    };
    let leaf_nbrs = |v: usize| -> Vec<usize> {
        let mut ls: Vec<usize> = t.adj[v].iter().copied().filter(|&w| t.is_leaf(w)).collect();
        ls.sort_by(|&x, &y| t.label[x].cmp(&t.label[y]));
        ls
    };
    let lbl = |v: usize| t.label[v].clone().expect("leaf");
    let smallest_other = |skip: &[usize]| -> Option<usize> {
        (0..t.adj.len()).filter(|&v| t.is_leaf(v) && !skip.contains(&v)).min_by(|&x, &y| t.label[x].cmp(&t.label[y]))
    };

    let mut cherries: Vec<(usize, usize)> = Vec::new();
    for v in 0..t.adj.len() {
        let ls = leaf_nbrs(v);
        if t.is_leaf(v) || ls.len() < 2 {
            continue;
        }
        for i in 0..ls.len() {
            for j in i + 1..ls.len() {
                cherries.push((ls[i], ls[j]));
            }
        }
    }
    cherries.sort_by(|x, y| (&t.label[x.0], &t.label[x.1]).cmp(&(&t.label[y.0], &t.label[y.1])));
    for (x, y) in cherries {
        let (a, b) = match (free_leg(x), free_leg(y)) {
            (true, _) => (x, y),
            (false, true) => (y, x),
            _ => continue,
        };
        if let Some(c) = smallest_other(&[a, b]) {
            let triplet = Triplet::new(lbl(b), lbl(c), lbl(a)).expect("distinct leaves");
            return Some(MissingTriplet { triplet, via: MissingVia::Cherry });
        }
    }

    let chain_leaf = |v: usize| -> Option<usize> {
        if t.is_leaf(v) {
            return None;
        }
        match leaf_nbrs(v).as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    };
    let mut best: Option<(Label, Triplet)> = None;
    for v in 0..t.adj.len() {
        let Some(b) = chain_leaf(v) else { continue };
        if !free_leg(b) {
            continue;
        }
        let sides: Vec<usize> = t.adj[v].iter().copied().filter(|&w| w != b).collect();
        let (Some(a), Some(c)) = (chain_leaf(sides[0]), chain_leaf(sides[1])) else { continue };
        let cand = Triplet::new(lbl(a), lbl(c), lbl(b)).expect("distinct leaves");
        if best.as_ref().is_none_or(|(l, _)| lbl(b) < *l) {
            best = Some((lbl(b), cand));
        }
    }
    best.map(|(_, triplet)| MissingTriplet { triplet, via: MissingVia::Chain })
}

/// First triplet over the leaves, in canonical order, that no rooting
/// displays.
pub fn missing_triplet_brute(t: &UnrootedTree, rootings: &[Rooting]) -> Result<Option<Triplet>, ExtremalError> {
    let trees: Vec<RootedTree> = rootings.iter().map(|&r| t.root_at(r)).collect::<Result<_, _>>()?;
    let ls: Vec<Label> = t.labels().into_iter().collect();
    for i in 0..ls.len() {
        for j in i + 1..ls.len() {
            for k in j + 1..ls.len() {
                let (x, y, z) = (&ls[i], &ls[j], &ls[k]);
                for (a, b, c) in [(x, y, z), (x, z, y), (y, z, x)] {
                    let tr = Triplet::new(a.clone(), b.clone(), c.clone())?;
                    if !trees.iter().any(|r| r.displays(&tr).unwrap_or(true)) {
                        return Ok(Some(tr));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Constructive answer when the case split applies, otherwise a full scan.
pub fn find_missing_triplet(t: &UnrootedTree, rootings: &[Rooting]) -> Result<Option<MissingTriplet>, ExtremalError> {
    if let Some(m) = missing_triplet_constructive(t, rootings) {
        return Ok(Some(m));
    }
    Ok(missing_triplet_brute(t, rootings)?.map(|triplet| MissingTriplet { triplet, via: MissingVia::Scan }))
}
