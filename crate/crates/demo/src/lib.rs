//! Browser bindings: each export takes plain text or numbers and returns a
//! JSON string, `{"error": ...}` on bad input.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ternary_core::extremal::tau;
use ternary_core::orderings::Instance;
use ternary_core::phylo::{k_tree_compatible_with, CompatOutcome, TripletSet};
use ternary_core::solver::{solve, Mode, Outcome, SolverConfig};

const CONFLICT_BUDGET: u64 = 200_000;
const MAX_TAU_LEAVES: usize = 7;

fn to_string(v: Result<Value, String>) -> String {
    v.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

pub fn solve_value(text: &str) -> Result<Value, String> {
    let inst = Instance::parse(text).map_err(|e| e.to_string())?;
    let cfg = SolverConfig { mode: Mode::ClauseLearning, ..SolverConfig::default() }.with_limit(CONFLICT_BUDGET);
    let r = solve(&inst, &cfg).map_err(|e| e.to_string())?;
    Ok(json!({
        "outcome": r.outcome.label(),
        "orderings": match &r.outcome {
            Outcome::Sat(s) => json!(s.report(&inst).orderings),
            _ => Value::Null,
        },
        "conflicts": r.nodes,
    }))
}

pub fn compat_value(text: &str, k: usize, caterpillar: bool) -> Result<Value, String> {
    let r = TripletSet::parse(text).map_err(|e| e.to_string())?;
    let rep = k_tree_compatible_with(&r, k, caterpillar, Some(CONFLICT_BUDGET));
    let (answer, trees) = match rep.outcome {
        CompatOutcome::Compatible(ts) => ("yes", ts.iter().map(|t| t.to_newick()).collect()),
        CompatOutcome::Incompatible => ("no", Vec::new()),
        CompatOutcome::Unknown => ("unknown", Vec::new()),
    };
    Ok(json!({ "answer": answer, "trees": trees, "triplets": r.len() }))
}

pub fn tau_value(n: usize, caterpillar: bool) -> Result<Value, String> {
    if !(3..=MAX_TAU_LEAVES).contains(&n) {
        return Err(format!("n must lie in 3..={MAX_TAU_LEAVES}"));
    }
    let v = tau(n, caterpillar, Some(CONFLICT_BUDGET)).map_err(|e| e.to_string())?;
    let witness = v.steps.last().map(|s| s.witness_newick.clone()).unwrap_or_default();
    Ok(json!({ "value": v.value, "exact": v.exact, "witness": witness }))
}

/// Decides a `.csp` instance (`pi`, `k`, `vars`, `c` lines).
#[wasm_bindgen(js_name = solveCsp)]
pub fn solve_csp(text: &str) -> String {
    to_string(solve_value(text))
}

/// Decides whether `k` trees (or caterpillars) display every `a b | c` line.
#[wasm_bindgen(js_name = compatTriplets)]
pub fn compat_triplets(text: &str, k: usize, caterpillar: bool) -> String {
    to_string(compat_value(text, k, caterpillar))
}

/// Fewest trees (or caterpillars) displaying all triplets on `n` leaves.
#[wasm_bindgen(js_name = coverNumber)]
pub fn cover_number(n: usize, caterpillar: bool) -> String {
    to_string(tau_value(n, caterpillar))
}
