//! From two-caterpillar compatibility to three caterpillars and to three
//! trees, built around the six-leaf caterpillar triple on 0..5.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use crate::gadgets::{derive_caterpillar_triple, CaterpillarTriple};
use crate::phylo::{ordering_of, Label, NodeId, PhyloError, RootedTree, Triplet, TripletSet};

use super::{fresh, Parts, ReductionError};

/// The derived caterpillar triple, computed once.
pub fn core_triple() -> &'static CaterpillarTriple {
    static CORE: OnceLock<CaterpillarTriple> = OnceLock::new();
    CORE.get_or_init(|| derive_caterpillar_triple().expect("a qualifying caterpillar triple exists"))
}

fn core_labels() -> BTreeSet<Label> {
    (0..6).map(Label::from).collect()
}

#[derive(Debug, Clone)]
pub struct PhyloReduction {
    pub target: TripletSet,
    /// Each source triplet with its fresh taxon.
    pub fresh_taxa: Vec<(Triplet, Label)>,
    pub parts: Parts,
}

impl PhyloReduction {
    pub fn source_labels(&self) -> BTreeSet<Label> {
        self.fresh_taxa.iter().flat_map(|(t, _)| t.labels().map(Clone::clone)).collect()
    }
}

fn t(a: &Label, b: &Label, c: &Label) -> Result<Triplet, ReductionError> {
    Ok(Triplet::new(a.clone(), b.clone(), c.clone())?)
}

fn prepare(src: &TripletSet, tag: &str) -> Result<Vec<(Triplet, Label)>, ReductionError> {
    let reserved = core_labels();
    let labels = src.labels();
    if let Some(l) = labels.iter().find(|l| reserved.contains(*l)) {
        return Err(ReductionError::Collision(l.to_string()));
    }
    src.iter()
        .enumerate()
        .map(|(i, tr)| {
            let ab = Label::new(fresh(tag, i, "ab"))?;
            if labels.contains(&ab) {
                return Err(ReductionError::Collision(ab.to_string()));
            }
            Ok((tr.clone(), ab))
        })
        .collect()
}

/// Shared blocks: the fresh-taxon witness triplet, the pair above 2, and the
/// fresh taxon above the cherry.
fn common_blocks(
    fresh_taxa: &[(Triplet, Label)],
    n: &[Label; 6],
    out: &mut TripletSet,
    parts: &mut Parts,
    names: [&str; 3],
) -> Result<(), ReductionError> {
    let mut witness = TripletSet::new();
    let mut above_two = TripletSet::new();
    let mut fresh_above = TripletSet::new();
    for (tr, ab) in fresh_taxa {
        let (a, b, c) = (&tr.a, &tr.b, &tr.c);
        witness.insert(t(&n[0], ab, c)?);
        for x in [a, b] {
            above_two.insert(t(&n[2], &n[5], x)?);
            above_two.insert(t(&n[1], &n[2], x)?);
            above_two.insert(t(&n[0], x, &n[2])?);
        }
        for x in [a, b] {
            fresh_above.insert(t(&n[5], x, ab)?);
            fresh_above.insert(t(&n[1], x, ab)?);
        }
    }
    parts.push(names[0], witness.len());
    parts.push(names[1], above_two.len());
    parts.push(names[2], fresh_above.len());
    out.extend(witness);
    out.extend(above_two);
    out.extend(fresh_above);
    Ok(())
}

fn taxa_of(tr: &Triplet, ab: &Label) -> [Label; 4] {
    [tr.a.clone(), tr.b.clone(), tr.c.clone(), ab.clone()]
}

fn core_names() -> [Label; 6] {
    [0, 1, 2, 3, 4, 5].map(Label::from)
}

/// Core triplets plus blocks `R1..R5`, one fresh taxon per source triplet.
pub fn reduce_2cat_to_3cat(src: &TripletSet) -> Result<PhyloReduction, ReductionError> {
    let fresh_taxa = prepare(src, "3cat")?;
    let n = core_names();
    let mut out = core_triple().triplets();
    let mut parts = Parts::default();
    parts.push("C", out.len());
    let mut r1 = TripletSet::new();
    let mut r2 = TripletSet::new();
    for (tr, ab) in &fresh_taxa {
        for x in taxa_of(tr, ab) {
            r1.insert(t(&n[3], &x, &n[5])?);
            r1.insert(t(&n[3], &x, &n[1])?);
            r1.insert(t(&n[4], &x, &n[0])?);
        }
        r2.insert(t(&n[4], ab, &n[2])?);
    }
    parts.push("R1", r1.len());
    parts.push("R2", r2.len());
    out.extend(r1);
    out.extend(r2);
    common_blocks(&fresh_taxa, &n, &mut out, &mut parts, ["R3", "R4", "R5"])?;
    Ok(PhyloReduction { target: out, fresh_taxa, parts })
}

/// Core triplets plus blocks `R1..R6`.
pub fn reduce_2cat_to_3tree(src: &TripletSet) -> Result<PhyloReduction, ReductionError> {
    let fresh_taxa = prepare(src, "3tree")?;
    let n = core_names();
    let mut out = core_triple().triplets();
    let mut parts = Parts::default();
    parts.push("C", out.len());
    let mut r1 = TripletSet::new();
    let mut r2 = TripletSet::new();
    let mut r3 = TripletSet::new();
    for (tr, ab) in &fresh_taxa {
        for x in taxa_of(tr, ab) {
            for w in [&n[5], &n[1], &n[0]] {
                for y in [&n[2], &n[3], &n[4]] {
                    r1.insert(t(y, &x, w)?);
                }
            }
            r2.insert(t(&n[0], &n[1], &x)?);
            r2.insert(t(&n[0], &n[5], &x)?);
        }
        for y in [&n[3], &n[4], &n[5]] {
            r3.insert(t(y, ab, &n[2])?);
        }
    }
    parts.push("R1", r1.len());
    parts.push("R2", r2.len());
    parts.push("R3", r3.len());
    out.extend(r1);
    out.extend(r2);
    out.extend(r3);
    common_blocks(&fresh_taxa, &n, &mut out, &mut parts, ["R4", "R5", "R6"])?;
    Ok(PhyloReduction { target: out, fresh_taxa, parts })
}

/// Root-first leaf sequence of a caterpillar (or a tree with at most two
/// leaves).
fn top_down(s: &RootedTree) -> Result<Vec<Label>, ReductionError> {
    Ok(ordering_of(s)?.into_vec())
}

/// Builds the three caterpillars from two source caterpillars: each source
/// caterpillar goes just above the cherry of its core caterpillar with every
/// fresh taxon directly above the higher of its pair; the third core
/// caterpillar receives all source labels below its top leaf and the fresh
/// taxa just below leaf 2.
pub fn lift_2cat_to_3cat(red: &PhyloReduction, s: [&RootedTree; 2]) -> Result<[RootedTree; 3], ReductionError> {
    let source = red.source_labels();
    let core = core_triple();
    let mut regions = Vec::new();
    for tree in s {
        let mut seq: Vec<Label> = top_down(tree)?;
        if let Some(l) = seq.iter().find(|l| !source.contains(*l)) {
            return Err(ReductionError::Phylo(PhyloError::UnknownLabel(l.to_string())));
        }
        let missing: Vec<Label> = source.iter().filter(|l| !seq.contains(l)).cloned().collect();
        seq.splice(0..0, missing);
        let mut before: BTreeMap<Label, Vec<Label>> = BTreeMap::new();
        for (tr, ab) in &red.fresh_taxa {
            let pos = |x: &Label| seq.iter().position(|y| y == x).expect("source label");
            let higher = if pos(&tr.a) < pos(&tr.b) { &tr.a } else { &tr.b };
            before.entry(higher.clone()).or_default().push(ab.clone());
        }
        let mut region = Vec::new();
        for x in seq {
            if let Some(abs) = before.remove(&x) {
                region.extend(abs);
            }
            region.push(x);
        }
        regions.push(region);
    }
    let splice_above_cherry = |cat: &[Label], region: &[Label]| -> Vec<Label> {
        let k = cat.len() - 2;
        [&cat[..k], region, &cat[k..]].concat()
    };
    let c1 = core.orderings[0].as_slice();
    let c2 = core.orderings[1].as_slice();
    let c3 = core.orderings[2].as_slice();
    let t1 = splice_above_cherry(c1, &regions[0]);
    let t2 = splice_above_cherry(c2, &regions[1]);
    let two = Label::from(2usize);
    let p2 = c3.iter().position(|x| *x == two).expect("core label");
    let fresh: Vec<Label> = red.fresh_taxa.iter().map(|(_, ab)| ab.clone()).collect();
    let src: Vec<Label> = source.into_iter().collect();
    let t3 = [&c3[..1], &src[..], &c3[1..=p2], &fresh[..], &c3[p2 + 1..]].concat();
    Ok([RootedTree::caterpillar(&t1)?, RootedTree::caterpillar(&t2)?, RootedTree::caterpillar(&t3)?])
}

/// Orders three target trees as the slots of the core triple, by their
/// restriction to 0..5.
fn slots(trees: &[RootedTree]) -> Result<[&RootedTree; 3], ReductionError> {
    let core = core_triple();
    let keep = core_labels();
    let mut out: [Option<&RootedTree>; 3] = [None; 3];
    for t in trees {
        let r = t.restrict(&keep)?;
        if let Some(i) = core.trees.iter().position(|c| *c == r) {
            out[i].get_or_insert(t);
        }
    }
    match out {
        [Some(a), Some(b), Some(c)] => Ok([a, b, c]),
        _ => Err(ReductionError::Structure("trees do not restrict to the core triple".into())),
    }
}

/// Restricts the first two slots to the source labels.
pub fn back_2cat_to_3cat(red: &PhyloReduction, trees: &[RootedTree]) -> Result<[RootedTree; 2], ReductionError> {
    let [t1, t2, _] = slots(trees)?;
    let keep = red.source_labels();
    Ok([t1.restrict(&keep)?, t2.restrict(&keep)?])
}

/// Flattens the first two slots into caterpillars, then restricts them to
/// the source labels.
pub fn back_2cat_to_3tree(red: &PhyloReduction, trees: &[RootedTree]) -> Result<[RootedTree; 2], ReductionError> {
    let [t1, t2, _] = slots(trees)?;
    let keep = red.source_labels();
    Ok([flatten_to_caterpillar(t1)?.restrict(&keep)?, flatten_to_caterpillar(t2)?.restrict(&keep)?])
}

/// [`flatten_relaxed`] with core leaves 0..5.
pub fn flatten_to_caterpillar(t: &RootedTree) -> Result<RootedTree, ReductionError> {
    flatten_relaxed(t, &core_labels())
}

fn precondition(msg: &str) -> ReductionError {
    ReductionError::Phylo(PhyloError::Precondition(msg.to_string()))
}

/// Turns a tree whose restriction to `core` is a relaxed caterpillar into a
/// caterpillar. Pendant subtrees off the spine are laid out in place; pendant
/// subtrees off the leg of a core leaf are moved directly above the spine
/// vertex of that leg. Leaves inside one pendant subtree are listed by depth.
pub fn flatten_relaxed(t: &RootedTree, core: &BTreeSet<Label>) -> Result<RootedTree, ReductionError> {
    let r = t.restrict(core)?;
    if core.len() < 3 || !r.is_caterpillar() {
        return Err(precondition("restriction to the core is not a caterpillar"));
    }
    let order = ordering_of(&r)?.into_vec();
    let top = &order[0];
    let (c, c2) = (&order[order.len() - 2], &order[order.len() - 1]);
    let leaf = |l: &Label| t.leaf_node(l).expect("core label present");
    let p = t.parent(leaf(c)).expect("non-root leaf");
    if t.parent(leaf(c2)) != Some(p) {
        return Err(precondition("core cherry is not a cherry of the tree"));
    }
    if t.parent(leaf(top)) != Some(t.root()) {
        return Err(precondition("top core leaf is not a child of the root"));
    }
    let core_below = |v: NodeId| -> Vec<Label> { t.cluster(v).into_iter().filter(|l| core.contains(l)).collect() };

    let mut seq = Vec::new();
    let mut v = t.root();
    while v != p {
        let kids = t.children(v);
        let (on, off): (Vec<NodeId>, Vec<NodeId>) = kids.into_iter().partition(|&k| t.cluster(k).contains(c));
        let (next, w) = match (on.as_slice(), off.as_slice()) {
            ([n], [w]) => (*n, *w),
            _ => return Err(precondition("tree is not binary")),
        };
        match core_below(w).as_slice() {
            [] => seq.extend(pendant_leaves(t, w)),
            [ell] => {
                let mut u = w;
                while !t.is_leaf(u) {
                    let kids = t.children(u);
                    let (to, side): (Vec<NodeId>, Vec<NodeId>) =
                        kids.into_iter().partition(|&k| t.cluster(k).contains(ell));
                    seq.extend(pendant_leaves(t, side[0]));
                    u = to[0];
                }
                seq.push(ell.clone());
            }
            _ => return Err(precondition("a pendant subtree holds two core leaves")),
        }
        v = next;
    }
    seq.push(c2.clone());
    seq.push(c.clone());
    Ok(RootedTree::caterpillar(&seq)?)
}

/// Leaves of the subtree at `v`, shallowest first, ties by label.
fn pendant_leaves(t: &RootedTree, v: NodeId) -> Vec<Label> {
    let mut out: Vec<(usize, Label)> = Vec::new();
    let mut stack = vec![(v, 0usize)];
    while let Some((u, d)) = stack.pop() {
        match t.label(u) {
            Some(l) => out.push((d, l.clone())),
            None => stack.extend(t.children(u).into_iter().map(|k| (k, d + 1))),
        }
    }
    out.sort();
    out.into_iter().map(|(_, l)| l).collect()
}

/// Pairs `(lower, upper)` where `upper` is above `lower` relative to `c`:
/// `lca(c, upper)` is a strict ancestor of `lca(c, lower)`.
pub fn above_pairs(t: &RootedTree, c: &Label) -> Result<BTreeSet<(Label, Label)>, PhyloError> {
    let ls: Vec<Label> = t.labels().cloned().collect();
    let anchors: Vec<NodeId> = ls.iter().map(|l| t.lca(c, l)).collect::<Result<_, _>>()?;
    let mut out = BTreeSet::new();
    for (i, x) in ls.iter().enumerate() {
        for (j, y) in ls.iter().enumerate() {
            if i != j && t.is_strict_ancestor(anchors[j], anchors[i]) {
                out.insert((x.clone(), y.clone()));
            }
        }
    }
    Ok(out)
}
