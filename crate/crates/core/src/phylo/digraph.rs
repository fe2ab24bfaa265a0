use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use super::tree::Label;
use super::PhyloError;

/// Directed graph without self-loops; parallel arcs collapse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Digraph {
    vertices: BTreeSet<Label>,
    arcs: BTreeSet<(Label, Label)>,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: Label) {
        self.vertices.insert(v);
    }

    pub fn add_arc(&mut self, u: Label, v: Label) -> Result<(), PhyloError> {
        if u == v {
            return Err(PhyloError::SelfLoop(u.to_string()));
        }
        self.vertices.insert(u.clone());
        self.vertices.insert(v.clone());
        self.arcs.insert((u, v));
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<Label> {
        &self.vertices
    }

    pub fn arcs(&self) -> &BTreeSet<(Label, Label)> {
        &self.arcs
    }

    pub fn has_arc(&self, u: &Label, v: &Label) -> bool {
        self.arcs.contains(&(u.clone(), v.clone()))
    }

    pub fn successors(&self, u: &Label) -> Vec<&Label> {
        self.arcs.iter().filter(|(a, _)| a == u).map(|(_, b)| b).collect()
    }

    pub fn out_degree(&self, u: &Label) -> usize {
        self.arcs.iter().filter(|(a, _)| a == u).count()
    }

    pub fn max_out_degree(&self) -> usize {
        let mut deg: BTreeMap<&Label, usize> = BTreeMap::new();
        for (a, _) in &self.arcs {
            *deg.entry(a).or_default() += 1;
        }
        deg.values().copied().max().unwrap_or(0)
    }

    /// Vertices in label order plus adjacency lists by index.
    pub fn indexed(&self) -> (Vec<Label>, Vec<Vec<usize>>) {
        let names: Vec<Label> = self.vertices.iter().cloned().collect();
        let idx: BTreeMap<&Label, usize> = names.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut adj = vec![Vec::new(); names.len()];
        for (a, b) in &self.arcs {
            adj[idx[a]].push(idx[b]);
        }
        (names, adj)
    }

    /// Kahn's algorithm taking the smallest available label first; `None`
    /// when there is a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<Label>> {
        let (names, adj) = self.indexed();
        let mut indeg = vec![0usize; names.len()];
        for outs in &adj {
            for &v in outs {
                indeg[v] += 1;
            }
        }
        let mut heap: BinaryHeap<Reverse<usize>> = (0..names.len()).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut out = Vec::with_capacity(names.len());
        while let Some(Reverse(u)) = heap.pop() {
            out.push(names[u].clone());
            for &v in &adj[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    heap.push(Reverse(v));
                }
            }
        }
        (out.len() == names.len()).then_some(out)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    pub fn induced(&self, keep: &BTreeSet<Label>) -> Digraph {
        Digraph {
            vertices: self.vertices.intersection(keep).cloned().collect(),
            arcs: self.arcs.iter().filter(|(a, b)| keep.contains(a) && keep.contains(b)).cloned().collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for v in &self.vertices {
            let _ = writeln!(s, "  {};", dot_id(v));
        }
        for (a, b) in &self.arcs {
            let _ = writeln!(s, "  {} -> {};", dot_id(a), dot_id(b));
        }
        s.push_str("}\n");
        s
    }

    /// Reads the DOT subset written by [`Digraph::to_dot`]: vertex
    /// statements, arc chains `a -> b -> c`, quoted ids, `//` and `#`
    /// comments. Attributes in brackets are ignored.
    pub fn parse_dot(text: &str) -> Result<Digraph, PhyloError> {
        let mut body = String::new();
        for line in text.lines() {
            let line = line.split("//").next().unwrap_or("");
            let line = if line.trim_start().starts_with('#') { "" } else { line };
            body.push_str(line);
            body.push('\n');
        }
        let open = body.find('{').ok_or_else(|| PhyloError::Dot("missing '{'".into()))?;
        let close = body.rfind('}').ok_or_else(|| PhyloError::Dot("missing '}'".into()))?;
        let header = body[..open].trim();
        if !header.starts_with("digraph") && !header.starts_with("strict digraph") {
            return Err(PhyloError::Dot("expected `digraph`".into()));
        }
        let mut g = Digraph::new();
        for stmt in body[open + 1..close].split([';', '\n']) {
            let stmt = match stmt.find('[') {
                Some(i) => &stmt[..i],
                None => stmt,
            };
            let stmt = stmt.trim();
            if stmt.is_empty() || stmt.contains('=') {
                continue;
            }
            let ids: Vec<Label> = stmt
                .split("->")
                .map(|p| {
                    let p = p.trim().trim_matches('"');
                    Label::new(p).map_err(|_| PhyloError::Dot(format!("bad vertex id `{p}`")))
                })
                .collect::<Result<_, _>>()?;
            if ids.len() == 1 {
                g.add_vertex(ids[0].clone());
            }
            for w in ids.windows(2) {
                g.add_arc(w[0].clone(), w[1].clone())?;
            }
        }
        Ok(g)
    }
}

fn dot_id(l: &Label) -> String {
    if l.as_str().chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        l.to_string()
    } else {
        format!("\"{l}\"")
    }
}
