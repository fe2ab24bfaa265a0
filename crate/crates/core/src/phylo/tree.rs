use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::triplet::{Triplet, TripletSet};
use super::PhyloError;

/// A taxon name. Ordered naturally: all-digit labels numerically and before
/// any other label, the rest lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Label(String);

impl Label {
    pub fn new(s: impl Into<String>) -> Result<Self, PhyloError> {
        let s = s.into();
        if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '|' || c == '#' || c == '\'') {
            return Err(PhyloError::BadLabel(s));
        }
        Ok(Label(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeric(&self) -> Option<u128> {
        if self.0.len() <= 30 && self.0.bytes().all(|b| b.is_ascii_digit()) {
            self.0.parse().ok()
        } else {
            None
        }
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric(), other.numeric()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<&str> for Label {
    /// Panics on labels containing whitespace, `|`, `#` or `'`.
    fn from(s: &str) -> Self {
        Label::new(s).expect("invalid label")
    }
}

impl From<usize> for Label {
    fn from(i: usize) -> Self {
        Label(i.to_string())
    }
}

impl TryFrom<String> for Label {
    type Error = PhyloError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Label::new(s)
    }
}

impl From<Label> for String {
    fn from(l: Label) -> String {
        l.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub fn labels<I, S>(xs: I) -> BTreeSet<Label>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    xs.into_iter().map(|s| Label::from(s.as_ref())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone)]
struct Node {
    parent: Option<usize>,
    children: Vec<usize>,
    label: Option<Label>,
}

/// Leaf-labelled rooted binary tree stored as an arena.
///
/// Equality and hashing use the canonical form: the label set plus the set
/// of clusters below internal nodes.
#[derive(Debug, Clone)]
pub struct RootedTree {
    nodes: Vec<Node>,
    root: usize,
    leaves: BTreeMap<Label, usize>,
}

impl PartialEq for RootedTree {
    fn eq(&self, other: &Self) -> bool {
        self.leaves.len() == other.leaves.len()
            && self.leaves.keys().eq(other.leaves.keys())
            && self.clusters() == other.clusters()
    }
}

impl Eq for RootedTree {}

impl Hash for RootedTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.clusters().hash(state)
    }
}

impl PartialOrd for RootedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.leaves.keys().cmp(other.leaves.keys()).then_with(|| self.clusters().cmp(&other.clusters()))
    }
}

impl RootedTree {
    pub fn leaf(l: Label) -> Self {
        let mut leaves = BTreeMap::new();
        leaves.insert(l.clone(), 0);
        RootedTree { nodes: vec![Node { parent: None, children: vec![], label: Some(l) }], root: 0, leaves }
    }

    /// New root with the two trees as children.
    pub fn join(a: &RootedTree, b: &RootedTree) -> Result<Self, PhyloError> {
        if let Some(l) = b.leaves.keys().find(|l| a.leaves.contains_key(*l)) {
            return Err(PhyloError::DuplicateLabel(l.to_string()));
        }
        let mut nodes = Vec::with_capacity(a.nodes.len() + b.nodes.len() + 1);
        let ra = append(&mut nodes, a, a.root);
        let rb = append(&mut nodes, b, b.root);
        let root = nodes.len();
        nodes.push(Node { parent: None, children: vec![ra, rb], label: None });
        nodes[ra].parent = Some(root);
        nodes[rb].parent = Some(root);
        Ok(RootedTree::from_nodes(nodes, root))
    }

    fn from_nodes(nodes: Vec<Node>, root: usize) -> Self {
        let leaves = nodes.iter().enumerate().filter_map(|(i, n)| n.label.clone().map(|l| (l, i))).collect();
        RootedTree { nodes, root, leaves }
    }

    /// Caterpillar listing leaves from the root downwards; the last two form
    /// the cherry.
    pub fn caterpillar(top_down: &[Label]) -> Result<Self, PhyloError> {
        let Some((last, rest)) = top_down.split_last() else {
            return Err(PhyloError::Empty);
        };
        let mut t = RootedTree::leaf(last.clone());
        for l in rest.iter().rev() {
            t = RootedTree::join(&RootedTree::leaf(l.clone()), &t)?;
        }
        Ok(t)
    }

    /// Builds the tree whose internal clusters are exactly `clusters`
    /// (the full label set may be omitted).
    pub fn from_clusters(label_set: &BTreeSet<Label>, clusters: &[BTreeSet<Label>]) -> Result<Self, PhyloError> {
        if label_set.is_empty() {
            return Err(PhyloError::Empty);
        }
        let mut cl: Vec<BTreeSet<Label>> = clusters.iter().filter(|c| c.len() >= 2).cloned().collect();
        cl.push(label_set.clone());
        cl.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        cl.dedup();
        for c in &cl {
            if !c.is_subset(label_set) {
                return Err(PhyloError::NotBinary);
            }
        }
        let mut nodes: Vec<Node> = Vec::new();
        for c in &cl {
            let parent = (0..nodes.len()).rev().find(|&p| cl[p].is_superset(c) && cl[p].len() > c.len());
            nodes.push(Node { parent, children: vec![], label: None });
            let id = nodes.len() - 1;
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
        }
        for l in label_set {
            let parent = (0..cl.len()).rev().find(|&p| cl[p].contains(l));
            let id = nodes.len();
            nodes.push(Node { parent, children: vec![], label: Some(l.clone()) });
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
        }
        if label_set.len() == 1 {
            let leaf = nodes.pop().expect("leaf");
            return Ok(RootedTree::leaf(leaf.label.expect("label")));
        }
        if nodes.iter().any(|n| n.label.is_none() && n.children.len() != 2) {
            return Err(PhyloError::NotBinary);
        }
        Ok(RootedTree::from_nodes(nodes, 0))
    }

    pub fn root(&self) -> NodeId {
        NodeId(self.root)
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> + '_ {
        self.leaves.keys()
    }

    pub fn label_set(&self) -> BTreeSet<Label> {
        self.leaves.keys().cloned().collect()
    }

    pub fn leaf_node(&self, l: &Label) -> Option<NodeId> {
        self.leaves.get(l).map(|&i| NodeId(i))
    }

    pub fn label(&self, v: NodeId) -> Option<&Label> {
        self.nodes[v.0].label.as_ref()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v.0].parent.map(NodeId)
    }

    pub fn children(&self, v: NodeId) -> Vec<NodeId> {
        self.nodes[v.0].children.iter().map(|&c| NodeId(c)).collect()
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v.0].children.is_empty()
    }

    pub fn depth(&self, v: NodeId) -> usize {
        let mut d = 0;
        let mut cur = v.0;
        while let Some(p) = self.nodes[cur].parent {
            d += 1;
            cur = p;
        }
        d
    }

    /// True when `a` is a proper ancestor of `b`.
    pub fn is_strict_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = b.0;
        while let Some(p) = self.nodes[cur].parent {
            if p == a.0 {
                return true;
            }
            cur = p;
        }
        false
    }

    fn node_of(&self, l: &Label) -> Result<usize, PhyloError> {
        self.leaves.get(l).copied().ok_or_else(|| PhyloError::UnknownLabel(l.to_string()))
    }

    /// Lowest common ancestor; `lca(x, x)` is the leaf itself.
    pub fn lca(&self, u: &Label, v: &Label) -> Result<NodeId, PhyloError> {
        Ok(self.lca_nodes(NodeId(self.node_of(u)?), NodeId(self.node_of(v)?)))
    }

    pub fn lca_nodes(&self, a: NodeId, b: NodeId) -> NodeId {
        let (mut a, mut b) = (a.0, b.0);
        let (mut da, mut db) = (self.depth(NodeId(a)), self.depth(NodeId(b)));
        while da > db {
            a = self.nodes[a].parent.expect("deeper node has a parent");
            da -= 1;
        }
        while db > da {
            b = self.nodes[b].parent.expect("deeper node has a parent");
            db -= 1;
        }
        while a != b {
            a = self.nodes[a].parent.expect("common root");
            b = self.nodes[b].parent.expect("common root");
        }
        NodeId(a)
    }

    /// `lca(a,c) = lca(b,c)` is a strict ancestor of `lca(a,b)`.
    pub fn displays(&self, r: &Triplet) -> Result<bool, PhyloError> {
        let ab = self.lca(&r.a, &r.b)?;
        let ac = self.lca(&r.a, &r.c)?;
        let bc = self.lca(&r.b, &r.c)?;
        Ok(ac == bc && self.is_strict_ancestor(ac, ab))
    }

    pub fn displays_all<'a>(&self, rs: impl IntoIterator<Item = &'a Triplet>) -> Result<bool, PhyloError> {
        for r in rs {
            if !self.displays(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Leaf labels below `v`, sorted.
    pub fn cluster(&self, v: NodeId) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        let mut stack = vec![v.0];
        while let Some(x) = stack.pop() {
            match &self.nodes[x].label {
                Some(l) => {
                    out.insert(l.clone());
                }
                None => stack.extend(&self.nodes[x].children),
            }
        }
        out
    }

    /// Clusters of all internal nodes, canonically sorted.
    pub fn clusters(&self) -> BTreeSet<BTreeSet<Label>> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].label.is_none()).map(|i| self.cluster(NodeId(i))).collect()
    }

    /// Every triplet displayed, one per 3-set of leaves.
    pub fn displayed_triplets(&self) -> TripletSet {
        let ls: Vec<&Label> = self.leaves.keys().collect();
        let mut out = TripletSet::new();
        for i in 0..ls.len() {
            for j in i + 1..ls.len() {
                for k in j + 1..ls.len() {
                    let (x, y, z) = (ls[i], ls[j], ls[k]);
                    for (a, b, c) in [(x, y, z), (x, z, y), (y, z, x)] {
                        let t = Triplet::new(a.clone(), b.clone(), c.clone()).expect("distinct");
                        if self.displays(&t).expect("labels present") {
                            out.insert(t);
                        }
                    }
                }
            }
        }
        out
    }

    /// Sibling leaf pairs, each pair sorted, list sorted.
    pub fn cherries(&self) -> Vec<(Label, Label)> {
        let mut out: Vec<(Label, Label)> = self
            .nodes
            .iter()
            .filter(|n| n.children.len() == 2)
            .filter_map(|n| {
                let a = self.nodes[n.children[0]].label.clone()?;
                let b = self.nodes[n.children[1]].label.clone()?;
                Some(if a < b { (a, b) } else { (b, a) })
            })
            .collect();
        out.sort();
        out
    }

    pub fn is_caterpillar(&self) -> bool {
        self.num_leaves() >= 2 && self.cherries().len() == 1
    }

    /// Minimal subtree spanning `keep` with unary vertices suppressed.
    pub fn restrict(&self, keep: &BTreeSet<Label>) -> Result<RootedTree, PhyloError> {
        if keep.is_empty() {
            return Err(PhyloError::Empty);
        }
        for l in keep {
            self.node_of(l)?;
        }
        Ok(self.restrict_rec(self.root, keep).expect("non-empty"))
    }

    fn restrict_rec(&self, v: usize, keep: &BTreeSet<Label>) -> Option<RootedTree> {
        let n = &self.nodes[v];
        if let Some(l) = &n.label {
            return keep.contains(l).then(|| RootedTree::leaf(l.clone()));
        }
        let parts: Vec<RootedTree> = n.children.iter().filter_map(|&c| self.restrict_rec(c, keep)).collect();
        match parts.len() {
            0 => None,
            1 => parts.into_iter().next(),
            _ => Some(RootedTree::join(&parts[0], &parts[1]).expect("disjoint subtrees")),
        }
    }

    /// Smallest label below each node, used to order children canonically.
    fn min_labels(&self) -> Vec<Label> {
        let mut out: Vec<Option<Label>> = vec![None; self.nodes.len()];
        for i in self.postorder() {
            let n = &self.nodes[i];
            out[i] = match &n.label {
                Some(l) => Some(l.clone()),
                None => n.children.iter().map(|&c| out[c].clone().expect("child done")).min(),
            };
        }
        out.into_iter().map(|l| l.expect("every node has a leaf below")).collect()
    }

    fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                out.push(v);
            } else {
                stack.push((v, true));
                for &c in &self.nodes[v].children {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Canonical Newick: children ordered by smallest descendant label.
    pub fn to_newick(&self) -> String {
        let mins = self.min_labels();
        let mut s = String::new();
        self.newick_rec(self.root, &mins, &mut s);
        s.push(';');
        s
    }

    fn newick_rec(&self, v: usize, mins: &[Label], out: &mut String) {
        let n = &self.nodes[v];
        if let Some(l) = &n.label {
            push_newick_label(l, out);
            return;
        }
        let mut ch = n.children.clone();
        ch.sort_by(|&a, &b| mins[a].cmp(&mins[b]));
        out.push('(');
        for (i, c) in ch.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.newick_rec(*c, mins, out);
        }
        out.push(')');
    }

    pub fn parse_newick(s: &str) -> Result<RootedTree, PhyloError> {
        let mut p = NewickParser { s: s.trim().as_bytes(), i: 0 };
        let t = p.subtree()?;
        p.skip_ws();
        if p.peek() == Some(b';') {
            p.i += 1;
        }
        p.skip_ws();
        if p.i != p.s.len() {
            return Err(PhyloError::Newick(format!("trailing input at byte {}", p.i)));
        }
        Ok(t)
    }
}

fn append(nodes: &mut Vec<Node>, t: &RootedTree, v: usize) -> usize {
    let offset = nodes.len();
    for n in &t.nodes {
        nodes.push(Node {
            parent: n.parent.map(|p| p + offset),
            children: n.children.iter().map(|c| c + offset).collect(),
            label: n.label.clone(),
        });
    }
    let r = v + offset;
    nodes[r].parent = None;
    r
}

fn push_newick_label(l: &Label, out: &mut String) {
    if l.as_str().chars().any(|c| "():;,[]".contains(c)) {
        out.push('\'');
        out.push_str(l.as_str());
        out.push('\'');
    } else {
        out.push_str(l.as_str());
    }
}

struct NewickParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl NewickParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.i += 1;
        }
    }

    fn err(&self, msg: &str) -> PhyloError {
        PhyloError::Newick(format!("{msg} at byte {}", self.i))
    }

    fn subtree(&mut self) -> Result<RootedTree, PhyloError> {
        self.skip_ws();
        let t = if self.peek() == Some(b'(') {
            self.i += 1;
            let a = self.subtree()?;
            self.skip_ws();
            if self.peek() != Some(b',') {
                return Err(self.err("expected ',' (trees must be binary)"));
            }
            self.i += 1;
            let b = self.subtree()?;
            self.skip_ws();
            if self.peek() != Some(b')') {
                return Err(self.err("expected ')' (trees must be binary)"));
            }
            self.i += 1;
            self.skip_ws();
            // Internal node names are not supported; a bare name here is an error.
            if self.peek().is_some_and(|c| !b",);:".contains(&c)) {
                return Err(self.err("internal node labels are not supported"));
            }
            RootedTree::join(&a, &b)?
        } else {
            RootedTree::leaf(self.label()?)
        };
        self.skip_ws();
        if self.peek() == Some(b':') {
            self.i += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit() || b".eE+-".contains(&c)) {
                self.i += 1;
            }
        }
        Ok(t)
    }

    fn label(&mut self) -> Result<Label, PhyloError> {
        let start = self.i;
        if self.peek() == Some(b'\'') {
            self.i += 1;
            let s = self.i;
            while self.peek().is_some_and(|c| c != b'\'') {
                self.i += 1;
            }
            if self.peek() != Some(b'\'') {
                return Err(self.err("unterminated quoted label"));
            }
            let text = std::str::from_utf8(&self.s[s..self.i]).map_err(|_| self.err("invalid utf-8"))?;
            self.i += 1;
            return Label::new(text);
        }
        while self.peek().is_some_and(|c| !b"(),;:".contains(&c) && !c.is_ascii_whitespace()) {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected a label"));
        }
        let text = std::str::from_utf8(&self.s[start..self.i]).map_err(|_| self.err("invalid utf-8"))?;
        Label::new(text)
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_newick())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::from(s)
    }

    fn cat(xs: &[&str]) -> RootedTree {
        RootedTree::caterpillar(&xs.iter().map(|s| l(s)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn natural_label_order() {
        let mut v = vec![l("10"), l("2"), l("b"), l("a"), l("0")];
        v.sort();
        assert_eq!(v, vec![l("0"), l("2"), l("10"), l("a"), l("b")]);
        assert!(Label::new("a b").is_err());
        assert!(Label::new("").is_err());
    }

    #[test]
    fn lca_cases() {
        let t = cat(&["1", "2", "3", "4"]);
        assert_eq!(t.lca(&l("1"), &l("4")).unwrap(), t.root());
        let cherry = t.lca(&l("3"), &l("4")).unwrap();
        assert_eq!(t.parent(t.leaf_node(&l("3")).unwrap()), Some(cherry));
        assert_eq!(t.lca(&l("2"), &l("2")).unwrap(), t.leaf_node(&l("2")).unwrap());
        assert!(t.lca(&l("1"), &l("9")).is_err());
    }

    #[test]
    fn display_in_small_trees() {
        let t = RootedTree::parse_newick("((0,1),2);").unwrap();
        assert!(t.displays(&Triplet::parse("01|2").unwrap()).unwrap());
        assert!(!t.displays(&Triplet::parse("02|1").unwrap()).unwrap());
        let c = cat(&["1", "2", "3", "4", "5"]);
        assert_eq!(c.displayed_triplets().len(), 10);
        assert!(c.displays(&Triplet::parse("45|1").unwrap()).unwrap());
        assert!(c.displays(&Triplet::parse("35|2").unwrap()).unwrap());
        assert!(!c.displays(&Triplet::parse("12|3").unwrap()).unwrap());
    }

    #[test]
    fn cherries_and_caterpillars() {
        let bal = RootedTree::parse_newick("((1,2),(3,4));").unwrap();
        assert_eq!(bal.cherries().len(), 2);
        assert!(!bal.is_caterpillar());
        let c = cat(&["1", "2", "3", "4"]);
        assert_eq!(c.cherries(), vec![(l("3"), l("4"))]);
        assert!(c.is_caterpillar());
        assert!(!RootedTree::leaf(l("x")).is_caterpillar());
    }

    #[test]
    fn restriction() {
        let c = cat(&["1", "2", "3", "4", "5", "6"]);
        assert_eq!(c.restrict(&c.label_set()).unwrap(), c);
        let r = c.restrict(&labels(["2", "5", "6"])).unwrap();
        assert_eq!(r.to_newick(), "(2,(5,6));");
        assert!(c.restrict(&labels(["9"])).is_err());
        assert_eq!(c.restrict(&labels(["4"])).unwrap().num_leaves(), 1);
    }

    #[test]
    fn newick_round_trip() {
        for s in ["((0,1),2);", "((a,b),(c,(d,e)));", "(('g:x:0:ab',1),2);"] {
            let t = RootedTree::parse_newick(s).unwrap();
            assert_eq!(RootedTree::parse_newick(&t.to_newick()).unwrap(), t);
        }
        assert_eq!(RootedTree::parse_newick("(2,(1,0));").unwrap().to_newick(), "((0,1),2);");
        assert_eq!(RootedTree::parse_newick("((a:1.5,b:2):0.1,c);").unwrap().to_newick(), "((a,b),c);");
        assert!(RootedTree::parse_newick("(a,b,c);").is_err());
        assert!(RootedTree::parse_newick("((a,b),a);").is_err());
        assert!(RootedTree::parse_newick("((a,b)x,c);").is_err());
    }

    #[test]
    fn clusters_build_back() {
        let t = RootedTree::parse_newick("((a,b),(c,(d,e)));").unwrap();
        let cl: Vec<_> = t.clusters().into_iter().collect();
        assert_eq!(RootedTree::from_clusters(&t.label_set(), &cl).unwrap(), t);
        assert!(RootedTree::from_clusters(&labels(["a", "b", "c"]), &[]).is_err());
    }
}
