use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::sample::subsequence;

use ternary_core::extremal::{
    full_triplet_set, greedy_caterpillar_cover, missing_triplet_brute, missing_triplet_constructive, rootings_of,
    tau_decision, Decision, Rooting, UnrootedTree,
};
use ternary_core::orderings::{implied_constraints, pi_family, satisfies, Constraint, Instance, LinearOrdering, VarId};
use ternary_core::phylo::{
    aho_build, caterpillar_compatible, k_tree_compatible, Label, RootedTree, Triplet, TripletSet,
};
use ternary_core::solver::{check_solution, enumerate_solutions, solve, Mode, Outcome, SolverConfig};

const TRIVIAL: [usize; 5] = [2, 3, 7, 8, 10];

fn ordering(n: usize) -> impl Strategy<Value = Vec<u32>> {
    Just((0..n as u32).collect::<Vec<u32>>()).prop_shuffle()
}

fn ordering_and_constraint() -> impl Strategy<Value = (Vec<u32>, [u32; 3])> {
    (3usize..=7).prop_flat_map(|n| (ordering(n), ordering(n).prop_map(|p| [p[0], p[1], p[2]])))
}

fn constraint_list(n: usize, max: usize) -> impl Strategy<Value = Vec<[u32; 3]>> {
    prop::collection::vec(ordering(n).prop_map(|p| [p[0], p[1], p[2]]), 0..=max)
}

fn instance(n: usize, pi: usize, k: usize, cs: &[[u32; 3]]) -> Instance {
    let names = (0..n).map(|i| format!("x{i}")).collect();
    let cs = cs.iter().map(|c| Constraint(VarId(c[0]), VarId(c[1]), VarId(c[2]))).collect();
    Instance::new(names, cs, pi_family(pi).unwrap(), k).unwrap()
}

/// A random binary tree on `1..=n`, built by repeated joins.
fn tree(n: usize) -> impl Strategy<Value = RootedTree> {
    (ordering(n), prop::collection::vec(any::<prop::sample::Index>(), n)).prop_map(move |(perm, picks)| {
        let mut forest: Vec<RootedTree> = perm.iter().map(|&i| RootedTree::leaf(Label::from(i as usize + 1))).collect();
        let mut picks = picks.into_iter();
        while forest.len() > 1 {
            let i = picks.next().map_or(0, |p| p.index(forest.len() - 1));
            let b = forest.remove(i + 1);
            let a = forest.remove(i);
            forest.insert(i, RootedTree::join(&a, &b).unwrap());
        }
        forest.pop().unwrap()
    })
}

fn triplets(n: usize, max: usize) -> impl Strategy<Value = TripletSet> {
    let all: Vec<Triplet> = full_triplet_set(n).unwrap().iter().cloned().collect();
    subsequence(all, 0..=max).prop_map(|ts| {
        let mut r = TripletSet::new();
        for t in ts {
            r.insert(t);
        }
        r
    })
}

proptest! {
    #[test]
    fn reversal_closed_families_ignore_direction((seq, c) in ordering_and_constraint()) {
        let a: LinearOrdering<u32> = seq.into_iter().collect();
        let c = Constraint(c[0], c[1], c[2]);
        for i in [5, 9] {
            let pi = pi_family(i).unwrap();
            prop_assert_eq!(satisfies(pi, &a, &c).unwrap(), satisfies(pi, &a.reversal(), &c).unwrap());
        }
    }

    #[test]
    fn trivial_families_hold_on_an_ordering_or_its_reversal((seq, c) in ordering_and_constraint()) {
        let a: LinearOrdering<u32> = seq.into_iter().collect();
        let c = Constraint(c[0], c[1], c[2]);
        for i in TRIVIAL {
            let pi = pi_family(i).unwrap();
            prop_assert!(satisfies(pi, &a, &c).unwrap() || satisfies(pi, &a.reversal(), &c).unwrap());
        }
    }

    #[test]
    fn satisfaction_survives_relabelling((seq, c) in ordering_and_constraint(), shift in 1u32..50) {
        let a: LinearOrdering<u32> = seq.iter().copied().collect();
        let b: LinearOrdering<u32> = seq.iter().map(|&x| x * 7 + shift).collect();
        let f = |x: u32| x * 7 + shift;
        for i in 0..11 {
            let pi = pi_family(i).unwrap();
            prop_assert_eq!(
                satisfies(pi, &a, &Constraint(c[0], c[1], c[2])).unwrap(),
                satisfies(pi, &b, &Constraint(f(c[0]), f(c[1]), f(c[2]))).unwrap()
            );
        }
    }

    #[test]
    fn implied_constraint_counts(seq in (3usize..=7).prop_flat_map(ordering)) {
        let m = seq.len();
        let a: LinearOrdering<u32> = seq.into_iter().collect();
        for i in 0..11 {
            let pi = pi_family(i).unwrap();
            let implied = implied_constraints(&a, pi);
            prop_assert_eq!(implied.len(), pi.len() * m * (m - 1) * (m - 2) / 6);
            prop_assert!(implied.iter().all(|c| satisfies(pi, &a, c).unwrap()));
        }
    }

    #[test]
    fn ordering_inverse_is_exact(seq in (1usize..=9).prop_flat_map(ordering)) {
        let a: LinearOrdering<u32> = seq.iter().copied().collect();
        for (i, x) in seq.iter().enumerate() {
            prop_assert_eq!(a.position(x), Some(i + 1));
            prop_assert_eq!(&a.as_slice()[i], x);
        }
    }

    #[test]
    fn instance_text_round_trip(n in 3usize..=6, pi in 0usize..11, k in 1usize..=3, cs in constraint_list(6, 6)) {
        let cs: Vec<[u32; 3]> = cs.into_iter().filter(|c| c.iter().all(|&v| (v as usize) < n)).collect();
        let inst = instance(n, pi, k, &cs);
        let back = Instance::parse(&inst.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), inst.to_text());
    }

    #[test]
    fn solver_modes_agree(n in 3usize..=6, pi in 0usize..11, k in 1usize..=2, cs in constraint_list(6, 8)) {
        let cs: Vec<[u32; 3]> = cs.into_iter().filter(|c| c.iter().all(|&v| (v as usize) < n)).collect();
        let inst = instance(n, pi, k, &cs);
        let decide = |mode: Mode| {
            let out = solve(&inst, &SolverConfig { mode, ..SolverConfig::default() }).unwrap().outcome;
            if let Outcome::Sat(s) = &out {
                assert!(check_solution(&inst, s).unwrap());
            }
            !matches!(out, Outcome::Unsat)
        };
        let reference = !enumerate_solutions(&inst, &SolverConfig::enumerate(Mode::Exhaustive)).unwrap().solutions.is_empty();
        prop_assert_eq!(decide(Mode::Exhaustive), reference);
        prop_assert_eq!(decide(Mode::BranchAndBound), reference);
        prop_assert_eq!(decide(Mode::ClauseLearning), reference);
        if TRIVIAL.contains(&pi) && k >= 2 {
            prop_assert!(reference);
        }
    }

    #[test]
    fn triplet_canonical_form(a in 1usize..=9, b in 1usize..=9, c in 1usize..=9) {
        prop_assume!(a != b && b != c && a != c);
        let x = Triplet::new(Label::from(a), Label::from(b), Label::from(c)).unwrap();
        let y = Triplet::new(Label::from(b), Label::from(a), Label::from(c)).unwrap();
        prop_assert_eq!(&x, &y);
        let mut r = TripletSet::new();
        prop_assert!(r.insert(x));
        prop_assert!(!r.insert(y));
    }

    #[test]
    fn newick_round_trip(t in (2usize..=8).prop_flat_map(tree)) {
        let back = RootedTree::parse_newick(&t.to_newick()).unwrap();
        prop_assert_eq!(back.clusters(), t.clusters());
        prop_assert_eq!(back.num_nodes(), 2 * t.num_leaves() - 1);
    }

    #[test]
    fn build_recovers_displayed_sets(t in (3usize..=8).prop_flat_map(tree)) {
        let r = t.displayed_triplets();
        let built = aho_build(&r, &t.label_set()).unwrap().expect("a tree's own triplets are compatible");
        prop_assert_eq!(built.clusters(), t.clusters());
    }

    #[test]
    fn compatible_answers_display_everything(r in triplets(5, 6), k in 1usize..=3, cat in any::<bool>()) {
        if let Some(trees) = k_tree_compatible(&r, k, cat).trees() {
            prop_assert!(trees.len() <= k);
            prop_assert!(r.iter().all(|t| trees.iter().any(|x| x.displays(t).unwrap())));
            if cat {
                prop_assert!(trees.iter().all(RootedTree::is_caterpillar));
            }
        }
    }

    #[test]
    fn caterpillar_compatibility_matches_a_single_cover(r in triplets(5, 5)) {
        prop_assume!(!r.is_empty());
        let found = caterpillar_compatible(&r, &r.labels()).unwrap();
        prop_assert_eq!(found.is_some(), k_tree_compatible(&r, 1, true).is_compatible());
        if let Some(c) = found {
            prop_assert!(c.is_caterpillar());
            prop_assert!(c.displays_all(r.iter()).unwrap());
        }
    }

    #[test]
    fn greedy_cover_is_complete(n in 3usize..=7) {
        let full = full_triplet_set(n).unwrap();
        let cover = greedy_caterpillar_cover(&full);
        prop_assert!(full.iter().all(|t| cover.iter().any(|c| c.displays(t).unwrap())));
    }

    #[test]
    fn rootings_are_binary_and_distinct(t in (3usize..=8).prop_flat_map(tree)) {
        let u = UnrootedTree::from_rooted(&t).unwrap();
        prop_assert!(u.is_binary());
        let rs = rootings_of(&u).unwrap();
        prop_assert_eq!(rs.len(), 2 * t.num_leaves() - 3);
        let distinct: BTreeSet<_> = rs.iter().map(RootedTree::clusters).collect();
        prop_assert_eq!(distinct.len(), rs.len());
    }

    #[test]
    fn constructive_missing_triplet_is_missing(t in (4usize..=8).prop_flat_map(tree), pick in subsequence((0usize..13).collect::<Vec<_>>(), 1..=3)) {
        let u = UnrootedTree::from_rooted(&t).unwrap();
        let edges = u.edges();
        let chosen: Vec<Rooting> = pick.iter().filter(|&&i| i < edges.len()).map(|&i| Rooting::new(edges[i].0, edges[i].1)).collect();
        prop_assume!(!chosen.is_empty());
        let brute = missing_triplet_brute(&u, &chosen).unwrap();
        if let Some(m) = missing_triplet_constructive(&u, &chosen) {
            prop_assert!(brute.is_some());
            for r in &chosen {
                prop_assert!(!u.root_at(*r).unwrap().displays(&m.triplet).unwrap());
            }
        }
    }
}

#[test]
fn tau_witnesses_cover_the_full_set() {
    for n in 3..=5 {
        let full = full_triplet_set(n).unwrap();
        for caterpillar in [false, true] {
            for k in 1..=4 {
                let d = tau_decision(n, k, caterpillar, None).unwrap();
                let brute = k_tree_compatible(&full, k, caterpillar);
                assert_eq!(d.decision == Decision::Yes, brute.is_compatible(), "n={n} k={k} caterpillar={caterpillar}");
                if d.decision == Decision::Yes {
                    assert!(d.witness.len() <= k);
                    assert!(full.iter().all(|t| d.witness.iter().any(|w| w.displays(t).unwrap())));
                    if caterpillar {
                        assert!(d.witness.iter().all(RootedTree::is_caterpillar));
                    }
                }
            }
        }
    }
}

#[test]
fn caterpillar_values_dominate_tree_values() {
    for n in 3..=6 {
        let first_yes =
            |cat: bool| (1..=6).find(|&k| tau_decision(n, k, cat, None).unwrap().decision == Decision::Yes).unwrap();
        let (t, c) = (first_yes(false), first_yes(true));
        assert!(t <= c, "n={n}: trees {t}, caterpillars {c}");
        assert!(c <= ternary_core::extremal::log_upper_bound(n).unwrap());
    }
}
