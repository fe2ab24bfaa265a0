//! Dichromatic-number reductions: bounding out-degree by three, and from
//! 2-dicolouring to two-caterpillar compatibility.

use std::collections::{BTreeMap, BTreeSet};

use crate::phylo::{caterpillar_compatible, is_dicoloring, Digraph, Label, RootedTree, Triplet, TripletSet};

use super::{fresh, Parts, ReductionError};

const OUTDEG_TAG: &str = "outdeg3";
const TWOCAT_TAG: &str = "2cat";

/// Gadget bookkeeping for one replaced vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexGadget {
    pub vertex: Label,
    /// Internal vertices of the balanced out-tree, excluding the root.
    pub tree_internal: Vec<Label>,
    /// Vertices of the mirrored complete binary tree, heap order (index 1 is
    /// the root).
    pub mirror: Vec<Label>,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct DigraphReduction {
    pub target: Digraph,
    pub gadgets: Vec<VertexGadget>,
    pub parts: Parts,
}

fn reserve(d: &Digraph, name: String) -> Result<Label, ReductionError> {
    let l = Label::new(name)?;
    if d.vertices().contains(&l) {
        return Err(ReductionError::Collision(l.to_string()));
    }
    Ok(l)
}

/// Replaces every vertex of out-degree at least 3 by a balanced out-tree whose
/// internal vertices are tied to the root's colour through a mirrored
/// complete binary tree of 2-cycles.
pub fn reduce_dichromatic_to_outdeg3(d: &Digraph) -> Result<DigraphReduction, ReductionError> {
    let mut out = Digraph::new();
    for v in d.vertices() {
        out.add_vertex(v.clone());
    }
    let mut gadgets = Vec::new();
    for (idx, v) in d.vertices().iter().enumerate() {
        let kids: Vec<Label> = d.successors(v).into_iter().cloned().collect();
        if kids.len() < 3 {
            for k in kids {
                out.add_arc(v.clone(), k)?;
            }
            continue;
        }
        let deg = kids.len();
        let mut internal = Vec::new();
        let mut pending = vec![(v.clone(), kids)];
        while let Some((node, list)) = pending.pop() {
            let (left, right) = list.split_at(list.len().div_ceil(2));
            for part in [left, right] {
                if part.len() == 1 {
                    out.add_arc(node.clone(), part[0].clone())?;
                } else {
                    let t = reserve(d, fresh(OUTDEG_TAG, idx, &format!("t{}", internal.len() + 1)))?;
                    internal.push(t.clone());
                    out.add_arc(node.clone(), t.clone())?;
                    pending.push((t, part.to_vec()));
                }
            }
        }
        debug_assert_eq!(internal.len(), deg - 2);
        let depth = (usize::BITS - (deg - 2).leading_zeros()) as usize;
        let leaves = 1usize << depth;
        let mut mirror = Vec::with_capacity(2 * leaves - 1);
        for h in 1..2 * leaves {
            mirror.push(reserve(d, fresh(OUTDEG_TAG, idx, &format!("m{h}")))?);
        }
        for h in 2..2 * leaves {
            let (child, parent) = (&mirror[h - 1], &mirror[h / 2 - 1]);
            out.add_arc(parent.clone(), child.clone())?;
            out.add_arc(child.clone(), parent.clone())?;
        }
        let anchors = std::iter::once(v).chain(internal.iter());
        for (j, a) in anchors.enumerate() {
            let leaf = &mirror[leaves + j - 1];
            out.add_arc(leaf.clone(), a.clone())?;
            out.add_arc(a.clone(), leaf.clone())?;
        }
        gadgets.push(VertexGadget { vertex: v.clone(), tree_internal: internal, mirror, depth });
    }
    let mut parts = Parts::default();
    parts.push("replaced", gadgets.len());
    parts.push("tree_internal", gadgets.iter().map(|g| g.tree_internal.len()).sum());
    parts.push("mirror", gadgets.iter().map(|g| g.mirror.len()).sum());
    parts.push("coupling_arcs", gadgets.iter().map(|g| 2 * (g.tree_internal.len() + 1)).sum());
    assert!(out.max_out_degree() <= 3, "out-degree bound");
    Ok(DigraphReduction { target: out, gadgets, parts })
}

/// Extends a 2-dicolouring: tree vertices copy their root, mirror vertices
/// alternate with the leaves taking the other colour.
pub fn lift_dichromatic_to_outdeg3(
    d: &Digraph,
    red: &DigraphReduction,
    col: &BTreeMap<Label, u8>,
) -> Result<BTreeMap<Label, u8>, ReductionError> {
    if !is_dicoloring(d, col) {
        return Err(ReductionError::NotASolution);
    }
    let mut out: BTreeMap<Label, u8> = d.vertices().iter().map(|v| (v.clone(), col[v])).collect();
    for g in &red.gadgets {
        let c = col[&g.vertex];
        for t in &g.tree_internal {
            out.insert(t.clone(), c);
        }
        for (h0, m) in g.mirror.iter().enumerate() {
            let level = (usize::BITS - 1 - (h0 + 1).leading_zeros()) as usize;
            let flip = (g.depth - level).is_multiple_of(2);
            out.insert(m.clone(), if flip { 1 - c } else { c });
        }
    }
    Ok(out)
}

/// Restriction of a target dicolouring to the source vertices.
pub fn back_dichromatic_to_outdeg3(
    d: &Digraph,
    col: &BTreeMap<Label, u8>,
) -> Result<BTreeMap<Label, u8>, ReductionError> {
    let out: BTreeMap<Label, u8> = d
        .vertices()
        .iter()
        .map(|v| col.get(v).map(|&c| (v.clone(), c)).ok_or(ReductionError::NotASolution))
        .collect::<Result<_, _>>()?;
    if !is_dicoloring(d, &out) {
        return Err(ReductionError::NotASolution);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct TwoCatReduction {
    pub target: TripletSet,
    /// Triplets contributed by each vertex, with its witness.
    pub per_vertex: Vec<(Label, Vec<Triplet>)>,
    pub parts: Parts,
}

/// One triplet per vertex of out-degree 1 or 2 (using a dummy taxon for a
/// single child) and the three pairings for out-degree 3.
pub fn reduce_outdeg3_to_2cat(d: &Digraph) -> Result<TwoCatReduction, ReductionError> {
    let mut target = TripletSet::new();
    let mut per_vertex = Vec::new();
    let mut counts = [0usize; 4];
    for (idx, v) in d.vertices().iter().enumerate() {
        let kids: Vec<Label> = d.successors(v).into_iter().cloned().collect();
        let ts = match kids.as_slice() {
            [] => Vec::new(),
            [a] => {
                let dummy = reserve(d, fresh(TWOCAT_TAG, idx, "d"))?;
                vec![Triplet::new(a.clone(), dummy, v.clone())?]
            }
            [a, b] => vec![Triplet::new(a.clone(), b.clone(), v.clone())?],
            [a, b, c] => vec![
                Triplet::new(a.clone(), b.clone(), v.clone())?,
                Triplet::new(a.clone(), c.clone(), v.clone())?,
                Triplet::new(b.clone(), c.clone(), v.clone())?,
            ],
            _ => return Err(ReductionError::OutDegree { vertex: v.to_string(), degree: kids.len() }),
        };
        counts[kids.len()] += 1;
        target.extend(ts.iter().cloned());
        per_vertex.push((v.clone(), ts));
    }
    let mut parts = Parts::default();
    parts.push("outdeg1", counts[1]);
    parts.push("outdeg2", counts[2]);
    parts.push("outdeg3", counts[3]);
    parts.push("triplets", target.len());
    Ok(TwoCatReduction { target, per_vertex, parts })
}

/// Splits the triplets by the colour of their witness and builds one
/// caterpillar per colour class.
pub fn lift_outdeg3_to_2cat(
    d: &Digraph,
    red: &TwoCatReduction,
    col: &BTreeMap<Label, u8>,
) -> Result<[RootedTree; 2], ReductionError> {
    if !is_dicoloring(d, col) {
        return Err(ReductionError::NotASolution);
    }
    let labels: BTreeSet<Label> = red.target.labels().into_iter().chain(d.vertices().iter().cloned()).collect();
    let mut classes = [TripletSet::new(), TripletSet::new()];
    for (v, ts) in &red.per_vertex {
        classes[col[v] as usize & 1].extend(ts.iter().cloned());
    }
    let build = |r: &TripletSet| -> Result<RootedTree, ReductionError> {
        caterpillar_compatible(r, &labels)?.ok_or(ReductionError::Structure("colour class has a cycle".into()))
    };
    Ok([build(&classes[0])?, build(&classes[1])?])
}

/// Colours each vertex by whether the first caterpillar displays its triplet
/// (or a majority of its three triplets).
pub fn back_outdeg3_to_2cat(
    d: &Digraph,
    red: &TwoCatReduction,
    trees: &[RootedTree],
) -> Result<BTreeMap<Label, u8>, ReductionError> {
    let mut col = BTreeMap::new();
    for (v, ts) in &red.per_vertex {
        let shown = match trees.first() {
            Some(first) => ts.iter().map(|t| first.displays(t)).collect::<Result<Vec<bool>, _>>()?,
            None if ts.is_empty() => Vec::new(),
            None => return Err(ReductionError::NotASolution),
        };
        let yes = shown.iter().filter(|&&b| b).count();
        col.insert(v.clone(), if ts.is_empty() || 2 * yes > ts.len() { 0 } else { 1 });
    }
    if !is_dicoloring(d, &col) {
        return Err(ReductionError::NotASolution);
    }
    Ok(col)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phylo::two_dicolorable;

    fn g(arcs: &[(&str, &str)]) -> Digraph {
        let mut d = Digraph::new();
        for (a, b) in arcs {
            d.add_arc(Label::from(*a), Label::from(*b)).unwrap();
        }
        d
    }

    #[test]
    fn out_degree_five_vertex() {
        let d = g(&[("v", "a"), ("v", "b"), ("v", "c"), ("v", "d"), ("v", "e"), ("a", "v")]);
        let r = reduce_dichromatic_to_outdeg3(&d).unwrap();
        assert_eq!(r.gadgets.len(), 1);
        assert_eq!(r.gadgets[0].tree_internal.len(), 3);
        assert_eq!(r.gadgets[0].depth, 2);
        assert_eq!(r.gadgets[0].mirror.len(), 7);
        assert!(r.target.max_out_degree() <= 3);
        let col = two_dicolorable(&d).unwrap();
        let lifted = lift_dichromatic_to_outdeg3(&d, &r, &col).unwrap();
        assert!(is_dicoloring(&r.target, &lifted));
        assert_eq!(back_dichromatic_to_outdeg3(&d, &lifted).unwrap(), col);
    }

    #[test]
    fn small_degrees_unchanged() {
        let d = g(&[("a", "b"), ("b", "c"), ("c", "a")]);
        let r = reduce_dichromatic_to_outdeg3(&d).unwrap();
        assert_eq!(r.target, d);
    }

    #[test]
    fn triplet_cases() {
        let d = g(&[("v", "a"), ("w", "a"), ("w", "b"), ("x", "a"), ("x", "b"), ("x", "c")]);
        let r = reduce_outdeg3_to_2cat(&d).unwrap();
        let find = |v: &str| r.per_vertex.iter().find(|(l, _)| l.as_str() == v).unwrap().1.clone();
        assert_eq!(find("v").len(), 1);
        assert!(find("v")[0].contains(&Label::from("g:2cat:3:d")));
        assert_eq!(find("w"), vec![Triplet::parse("a b | w").unwrap()]);
        assert_eq!(find("x").len(), 3);
        assert!(find("a").is_empty());
        let high = g(&[("v", "a"), ("v", "b"), ("v", "c"), ("v", "d")]);
        assert!(matches!(reduce_outdeg3_to_2cat(&high), Err(ReductionError::OutDegree { .. })));
    }

    #[test]
    fn two_cat_lifts() {
        let d = g(&[("a", "b"), ("b", "c"), ("c", "a"), ("c", "b")]);
        let r = reduce_outdeg3_to_2cat(&d).unwrap();
        let col = two_dicolorable(&d).unwrap();
        let trees = lift_outdeg3_to_2cat(&d, &r, &col).unwrap();
        assert!(r.target.iter().all(|t| trees.iter().any(|s| s.displays(t).unwrap())));
        assert!(trees.iter().all(RootedTree::is_caterpillar));
        let back = back_outdeg3_to_2cat(&d, &r, &trees).unwrap();
        assert!(is_dicoloring(&d, &back));
    }
}
