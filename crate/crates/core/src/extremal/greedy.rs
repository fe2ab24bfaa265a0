use std::collections::BTreeMap;

use crate::phylo::{Label, RootedTree, Triplet, TripletSet};

#[derive(Debug, Clone)]
pub struct GreedyRound {
    pub caterpillar: RootedTree,
    pub remaining_before: usize,
    pub covered: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum State {
    Open,
    Sure,
    Dead,
}

/// One caterpillar by the method of conditional expectations: the top-down
/// sequence is fixed one label at a time, each time picking the label that
/// maximises the expected number of triplets `ab|c` with `c` placed before
/// `a` and `b` under a uniformly random completion.
fn derandomised_caterpillar(r: &[&Triplet], labels: &[Label]) -> Vec<Label> {
    let pos: BTreeMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let ends: Vec<[usize; 3]> = r.iter().map(|t| [pos[&t.a], pos[&t.b], pos[&t.c]]).collect();
    let mut witness_of: Vec<Vec<usize>> = vec![Vec::new(); labels.len()];
    let mut pair_of: Vec<Vec<usize>> = vec![Vec::new(); labels.len()];
    for (i, [a, b, c]) in ends.iter().enumerate() {
        witness_of[*c].push(i);
        pair_of[*a].push(i);
        pair_of[*b].push(i);
    }
    let mut state = vec![State::Open; r.len()];
    let mut placed = vec![false; labels.len()];
    let mut seq = Vec::with_capacity(labels.len());
    for _ in 0..labels.len() {
        let gain = |x: usize, state: &[State]| -> i64 {
            let up = witness_of[x].iter().filter(|&&i| state[i] == State::Open).count() as i64;
            let down = pair_of[x].iter().filter(|&&i| state[i] == State::Open).count() as i64;
            2 * up - down
        };
        let x = (0..labels.len())
            .filter(|&x| !placed[x])
            .max_by_key(|&x| (gain(x, &state), std::cmp::Reverse(x)))
            .expect("an unplaced label");
        for &i in &witness_of[x] {
            if state[i] == State::Open {
                state[i] = State::Sure;
            }
        }
        for &i in &pair_of[x] {
            if state[i] == State::Open {
                state[i] = State::Dead;
            }
        }
        placed[x] = true;
        seq.push(labels[x].clone());
    }
    seq
}

/// Rounds of the greedy cover; each round's caterpillar displays at least a
/// third of the triplets still uncovered (checked at runtime).
pub fn greedy_caterpillar_rounds(r: &TripletSet) -> Vec<GreedyRound> {
    let labels: Vec<Label> = r.labels().into_iter().collect();
    let mut remaining: Vec<&Triplet> = r.iter().collect();
    let mut rounds = Vec::new();
    while !remaining.is_empty() {
        let seq = derandomised_caterpillar(&remaining, &labels);
        let cat = RootedTree::caterpillar(&seq).expect("labels are distinct and non-empty");
        let before = remaining.len();
        remaining.retain(|t| !cat.displays(t).expect("labels present"));
        let covered = before - remaining.len();
        assert!(3 * covered >= before, "round covered {covered} of {before}");
        rounds.push(GreedyRound { caterpillar: cat, remaining_before: before, covered });
    }
    rounds
}

/// Caterpillars whose union displays `r`.
pub fn greedy_caterpillar_cover(r: &TripletSet) -> Vec<RootedTree> {
    greedy_caterpillar_rounds(r).into_iter().map(|g| g.caterpillar).collect()
}
