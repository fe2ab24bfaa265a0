use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ternary_core::extremal::{tau, tau_decision, CoverModel, Decision};
use ternary_core::gadgets::{
    derive_caterpillar_triple, ordering_gadget, verify_tree_uniqueness, verify_uniqueness, SymmetrySpec,
};
use ternary_core::orderings::Instance;
use ternary_core::phylo::{
    is_dicoloring, k_tree_compatible_with, two_dicolorable_with, CompatOutcome, Digraph, TripletSet,
};
use ternary_core::reductions::*;
use ternary_core::solver::{enumerate_solutions, solve, Mode, Outcome, SolverConfig};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "ternary", version, about = "Ternary ordering CSPs and rooted-triplet compatibility")]
struct Cli {
    /// Worker threads for parallel searches (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Solve a `.csp` instance.
    Solve {
        file: PathBuf,
        /// List every solution multiset.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, value_enum, default_value_t = SolveMode::ClauseLearning)]
        mode: SolveMode,
        /// Search node budget; counts conflicts in clause-learning mode.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Apply a registered reduction and write the target instance.
    Reduce { name: String, input: PathBuf, output: PathBuf },
    /// Check a built-in gadget: pi5, pi6, pi9 or tree-triple.
    GadgetVerify {
        name: String,
        /// Compare raw solutions, without identifying symmetric ones.
        #[arg(long)]
        no_symmetry: bool,
    },
    /// Smallest number of trees (or caterpillars) displaying all triplets on n leaves.
    Tau {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        caterpillar: bool,
        /// Decide a single k instead of searching upward.
        #[arg(long)]
        k: Option<usize>,
        /// Write the covering model for `k` in LP format.
        #[arg(long, requires = "k")]
        lp: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Decide whether k trees jointly display a `.trip` triplet set.
    Compat {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        caterpillar: bool,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Decide whether a DOT digraph has an acyclic 2-colouring.
    Dicolor {
        file: PathBuf,
        #[arg(long)]
        limit: Option<u64>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SolveMode {
    /// Scan all k-tuples of permutations (at most 9 variables).
    Exhaustive,
    /// Prefix search with propagation.
    BranchAndBound,
    /// SAT encoding over pairwise precedences.
    ClauseLearning,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: u32,
    #[serde(flatten)]
    command: &'a Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    input_digest: Option<String>,
    result: Value,
    stats: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

/// Payload, statistics and exit status of one command.
struct Answer {
    digest: Option<String>,
    result: Value,
    stats: Value,
    code: u8,
}

fn read(path: &Path) -> Result<(String, String)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = format!("sha256:{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    Ok((text, digest))
}

fn exit_for(answer: Option<bool>) -> u8 {
    match answer {
        Some(true) => 0,
        Some(false) => 1,
        None => 2,
    }
}

fn cmd_solve(file: &Path, enumerate: bool, mode: Mode, limit: Option<u64>) -> Result<Answer> {
    let (text, digest) = read(file)?;
    let inst = Instance::parse(&text).with_context(|| format!("parsing {}", file.display()))?;
    let header = json!({
        "pi": inst.pi.index(),
        "k": inst.k,
        "variables": inst.num_vars(),
        "constraints": inst.constraints().len(),
    });
    if enumerate {
        let mut cfg = SolverConfig::enumerate(mode);
        cfg.node_limit = limit;
        let e = enumerate_solutions(&inst, &cfg)?;
        let sols: Vec<_> = e.solutions.iter().map(|s| s.report(&inst).orderings).collect();
        return Ok(Answer {
            digest: Some(digest),
            result: json!({
                "instance": header,
                "outcome": if sols.is_empty() { "unsat" } else { "sat" },
                "solutions": sols,
                "multisets": e.solutions.len(),
                "ordered": e.ordered,
            }),
            stats: json!({ "nodes": e.nodes }),
            code: exit_for(Some(!e.solutions.is_empty())),
        });
    }
    let cfg = SolverConfig { mode, node_limit: limit, ..SolverConfig::default() };
    let r = solve(&inst, &cfg)?;
    let answer = match &r.outcome {
        Outcome::Sat(_) => Some(true),
        Outcome::Unsat => Some(false),
        Outcome::Unknown => None,
    };
    Ok(Answer {
        digest: Some(digest),
        result: json!({
            "instance": header,
            "outcome": r.outcome.label(),
            "solution": r.outcome.solution().map(|s| s.report(&inst).orderings),
        }),
        stats: json!({ "nodes": r.nodes }),
        code: exit_for(answer),
    })
}

fn cmd_reduce(name: &str, input: &Path, output: &Path) -> Result<Answer> {
    let kind: ReductionKind = name.parse().map_err(anyhow::Error::msg)?;
    let (text, digest) = read(input)?;
    let parse_csp =
        || Instance::parse(&text).with_context(|| format!("parsing {} as a .csp instance", input.display()));
    let parse_trip =
        || TripletSet::parse(&text).with_context(|| format!("parsing {} as a triplet file", input.display()));
    let parse_dot =
        || Digraph::parse_dot(&text).with_context(|| format!("parsing {} as a DOT digraph", input.display()));
    let (written, size, parts) = match kind {
        ReductionKind::Pi5ToPi0
        | ReductionKind::Pi0ToPi1
        | ReductionKind::Pi9ToPi4
        | ReductionKind::Pi5ToPi5
        | ReductionKind::Pi1ToPi6
        | ReductionKind::Pi5ToPi9 => {
            let src = parse_csp()?;
            let red = match kind {
                ReductionKind::Pi5ToPi0 => reduce_1pi5_to_2pi0(&src),
                ReductionKind::Pi0ToPi1 => reduce_2pi0_to_2pi1(&src),
                ReductionKind::Pi9ToPi4 => reduce_1pi9_to_2pi4(&src),
                ReductionKind::Pi5ToPi5 => reduce_1pi5_to_2pi5(&src),
                ReductionKind::Pi1ToPi6 => reduce_2pi1_to_2pi6(&src),
                _ => reduce_1pi5_to_2pi9(&src),
            }?;
            let size = json!({
                "pi": red.target.pi.index(),
                "k": red.target.k,
                "variables": red.target.num_vars(),
                "constraints": red.target.constraints().len(),
            });
            (red.target.to_text(), size, red.parts)
        }
        ReductionKind::CatToThreeCat | ReductionKind::CatToThreeTree => {
            let src = parse_trip()?;
            let red = if kind == ReductionKind::CatToThreeCat {
                reduce_2cat_to_3cat(&src)
            } else {
                reduce_2cat_to_3tree(&src)
            }?;
            let size = json!({ "k": 3, "labels": red.target.labels().len(), "triplets": red.target.len() });
            (red.target.to_text(), size, red.parts)
        }
        ReductionKind::DichromaticToOutdeg3 => {
            let red = reduce_dichromatic_to_outdeg3(&parse_dot()?)?;
            let size = json!({ "vertices": red.target.vertices().len(), "arcs": red.target.arcs().len() });
            (red.target.to_dot(), size, red.parts)
        }
        ReductionKind::Outdeg3ToTwoCat => {
            let red = reduce_outdeg3_to_2cat(&parse_dot()?)?;
            let size = json!({ "k": 2, "labels": red.target.labels().len(), "triplets": red.target.len() });
            (red.target.to_text(), size, red.parts)
        }
    };
    fs::write(output, &written).with_context(|| format!("writing {}", output.display()))?;
    let manifest = json!({
        "schema": SCHEMA,
        "reduction": kind.name(),
        "source_kind": kind.source(),
        "target_kind": kind.target(),
        "input_digest": digest,
        "output": output.display().to_string(),
        "output_digest": format!("sha256:{:x}", Sha256::digest(written.as_bytes())),
        "target": size,
        "parts": parts.as_map(),
    });
    let manifest_path = manifest_path(output);
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(Answer { digest: Some(digest), result: manifest, stats: json!({}), code: 0 })
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

fn cmd_gadget_verify(name: &str, no_symmetry: bool) -> Result<Answer> {
    if name == "tree-triple" {
        let triple = derive_caterpillar_triple()?;
        let r = verify_tree_uniqueness(&triple.trees)?;
        let code = exit_for(Some(r.unique));
        return Ok(Answer { digest: None, result: serde_json::to_value(&r)?, stats: json!({}), code });
    }
    let Some(g) = ordering_gadget(name) else {
        bail!("unknown gadget {name:?}; expected pi5, pi6, pi9 or tree-triple");
    };
    let sym = if no_symmetry { SymmetrySpec::None } else { g.symmetry };
    let r = verify_uniqueness(&g.generators, g.pi, g.k(), sym)?;
    let code = exit_for(Some(r.unique));
    let mut result = serde_json::to_value(&r)?;
    result["gadget"] = json!(name);
    result["symmetry_description"] = json!(sym.description());
    Ok(Answer { digest: None, result, stats: json!({}), code })
}

fn cmd_tau(n: usize, caterpillar: bool, k: Option<usize>, lp: Option<&Path>, budget: Option<u64>) -> Result<Answer> {
    if let Some(k) = k {
        if let Some(path) = lp {
            let model = CoverModel::new(n, k, caterpillar)?;
            fs::write(path, model.to_lp()).with_context(|| format!("writing {}", path.display()))?;
        }
        let d = tau_decision(n, k, caterpillar, budget)?;
        let code = match d.decision {
            Decision::Yes => 0,
            Decision::No => 1,
            Decision::Unknown => 2,
        };
        let nodes = d.nodes;
        return Ok(Answer { digest: None, result: serde_json::to_value(&d)?, stats: json!({ "nodes": nodes }), code });
    }
    let v = tau(n, caterpillar, budget)?;
    let nodes: u64 = v.steps.iter().map(|s| s.nodes).sum();
    let code = exit_for(v.exact.then_some(true));
    Ok(Answer { digest: None, result: serde_json::to_value(&v)?, stats: json!({ "nodes": nodes }), code })
}

fn cmd_compat(file: &Path, k: usize, caterpillar: bool, limit: Option<u64>) -> Result<Answer> {
    let (text, digest) = read(file)?;
    let r = TripletSet::parse(&text).with_context(|| format!("parsing {}", file.display()))?;
    let rep = k_tree_compatible_with(&r, k, caterpillar, limit);
    let (answer, trees) = match &rep.outcome {
        CompatOutcome::Compatible(ts) => (Some(true), Some(ts.iter().map(|t| t.to_newick()).collect::<Vec<_>>())),
        CompatOutcome::Incompatible => (Some(false), None),
        CompatOutcome::Unknown => (None, None),
    };
    Ok(Answer {
        digest: Some(digest),
        result: json!({
            "k": k,
            "caterpillar": caterpillar,
            "labels": r.labels().len(),
            "triplets": r.len(),
            "answer": answer_word(answer),
            "trees": trees,
        }),
        stats: json!({ "nodes": rep.nodes }),
        code: exit_for(answer),
    })
}

fn cmd_dicolor(file: &Path, limit: Option<u64>) -> Result<Answer> {
    let (text, digest) = read(file)?;
    let d = Digraph::parse_dot(&text).with_context(|| format!("parsing {}", file.display()))?;
    let (answer, colouring) = match two_dicolorable_with(&d, limit) {
        Ok(Some(c)) => {
            debug_assert!(is_dicoloring(&d, &c));
            (Some(true), Some(c))
        }
        Ok(None) => (Some(false), None),
        Err(_) => (None, None),
    };
    let colouring =
        colouring.map(|c| c.into_iter().map(|(v, x)| (v.to_string(), x)).collect::<std::collections::BTreeMap<_, _>>());
    Ok(Answer {
        digest: Some(digest),
        result: json!({
            "vertices": d.vertices().len(),
            "arcs": d.arcs().len(),
            "answer": answer_word(answer),
            "coloring": colouring,
        }),
        stats: json!({}),
        code: exit_for(answer),
    })
}

fn answer_word(a: Option<bool>) -> &'static str {
    match a {
        Some(true) => "yes",
        Some(false) => "no",
        None => "unknown",
    }
}

fn run(cli: &Cli) -> Result<Answer> {
    match &cli.command {
        Command::Solve { file, enumerate, mode, limit } => {
            let mode = match mode {
                SolveMode::Exhaustive => Mode::Exhaustive,
                SolveMode::BranchAndBound => Mode::BranchAndBound,
                SolveMode::ClauseLearning => Mode::ClauseLearning,
            };
            cmd_solve(file, *enumerate, mode, *limit)
        }
        Command::Reduce { name, input, output } => cmd_reduce(name, input, output),
        Command::GadgetVerify { name, no_symmetry } => cmd_gadget_verify(name, *no_symmetry),
        Command::Tau { n, caterpillar, k, lp, budget } => cmd_tau(*n, *caterpillar, *k, lp.as_deref(), *budget),
        Command::Compat { file, k, caterpillar, limit } => cmd_compat(file, *k, *caterpillar, *limit),
        Command::Dicolor { file, limit } => cmd_dicolor(file, *limit),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    match run(&cli) {
        Ok(a) => {
            let report = Report {
                schema: SCHEMA,
                command: &cli.command,
                input_digest: a.digest,
                result: a.result,
                stats: a.stats,
                elapsed_ms: cli.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
            };
            match serde_json::to_string_pretty(&report) {
                Ok(s) => println!("{s}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(a.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
