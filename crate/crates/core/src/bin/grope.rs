use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use grope::dot::quotient_dot;
use grope::gen::{self, GropeSpec};
use grope::graph::IntersectionGraph;
use grope::handles::{attach_pair_handles, certify, Certificate};
use grope::model::{validate, CappedGrope, Model, ObjectKind, TransversePair};
use grope::oracles::collision_search;
use grope::pipeline::{theorem1_pipeline_with, PipelineConfig};
use grope::split::{split_pairs_to_line, split_to_distance_with, split_to_dyadic_with, split_tower_to_single, DEFAULT_BUDGET};
use grope::unravel::unravel;
use grope::Error;

#[derive(Parser)]
#[command(name = "grope", version, about = "Capped gropes, transverse pairs and Whitney towers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Distance / number of copies / tree radius.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Maximum number of objects a construction may create.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for model, report and DOT files; without it only the
    /// report is printed.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write quotient graphs before and after, as DOT.
    #[arg(long, global = true)]
    dot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model document against the structural rules.
    Validate { model: PathBuf },
    /// Split every grope to distance n.
    Split { model: PathBuf },
    /// Split transverse pairs until each sphere carries one pairing.
    SplitPair { model: PathBuf },
    /// Split Whitney towers until each disk carries one pairing.
    SplitTower { model: PathBuf },
    /// The basic construction at every transverse pair.
    Handles { model: PathBuf },
    /// Unravel the chain through the first transverse pair with n copies.
    Unravel { model: PathBuf },
    /// Turn the first transverse pair into gropes that form a tree to radius n.
    Pipeline { model: PathBuf },
    /// Certify the boundary matrix of the model's handle ledger.
    Certify { model: PathBuf },
    /// Run randomized self-checks.
    Fuzz,
}

struct Outcome {
    model: Option<Model>,
    report: Value,
    dots: Vec<(&'static str, String)>,
    ok: bool,
}

impl Outcome {
    fn ok(model: Option<Model>, report: impl Serialize) -> Self {
        Outcome { model, report: serde_json::to_value(report).expect("reports serialize"), dots: Vec::new(), ok: true }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Malformed(_) => 2,
        Error::Budget { .. } => 3,
        _ => 1,
    }
}

fn load(path: &Path) -> Result<Model, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    Model::from_json(&text)
}

fn first_pair(m: &Model) -> Result<TransversePair, Error> {
    m.pairs().into_iter().next().ok_or_else(|| Error::Precondition("model has no transverse pair".into()))
}

fn graph_of(m: &Model) -> IntersectionGraph {
    let g = IntersectionGraph::cap_graph(m);
    if g.vertex_count() > 0 {
        g
    } else {
        IntersectionGraph::from_model(m, &[ObjectKind::Sphere, ObjectKind::WhitneyDisk])
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let n = cli.n as usize;
    let budget = cli.budget as usize;
    let out = match &cli.command {
        Command::Validate { model } => {
            let m = load(model)?;
            let violations = validate(&m);
            let ok = violations.is_empty();
            let mut o = Outcome::ok(None, json!({ "valid": ok, "violations": violations }));
            o.ok = ok;
            o
        }
        Command::Split { model } => {
            let mut m = load(model)?;
            let mut reports = Vec::new();
            for g in CappedGrope::all(&m) {
                let (next, report) = if CappedGrope::of(&m, g.base)?.caps(&m)?.is_empty() {
                    let (next, splits) = split_to_dyadic_with(&m, g.base, budget)?;
                    (next, json!({ "grope": g.base, "splits": splits }))
                } else {
                    let (next, r) = split_to_distance_with(&m, g.base, n, budget)?;
                    (next, json!({ "grope": g.base, "report": r }))
                };
                m = next;
                reports.push(report);
            }
            let collision = collision_search(&m, n);
            Outcome::ok(Some(m), json!({ "n": n, "gropes": reports, "collision": collision }))
        }
        Command::SplitPair { model } => {
            let m = load(model)?;
            let (next, splits) = split_pairs_to_line(&m, budget)?;
            let pairs = next.pairs().len();
            Outcome::ok(Some(next), json!({ "splits": splits, "pairs": pairs }))
        }
        Command::SplitTower { model } => {
            let mut m = load(model)?;
            let mut total = 0;
            for pair in m.pairs() {
                let (next, splits) = split_tower_to_single(&m, &pair, budget)?;
                m = next;
                total += splits;
            }
            Outcome::ok(Some(m), json!({ "splits": total }))
        }
        Command::Handles { model } => {
            let mut m = load(model)?;
            let before = graph_of(&m);
            for pair in m.pairs() {
                m = attach_pair_handles(&m, &pair)?;
            }
            let projected = grope::handles::certify_projected(&m.ledger);
            let report = json!({
                "handles": m.ledger.records.len(),
                "pending": m.ledger.obligations.len(),
                "certificate": m.ledger.report(&projected, true),
            });
            let mut o = Outcome::ok(None, report);
            o.ok = projected.is_success();
            o.dots = vec![("before", quotient_dot(&m, &before, "before")), ("after", quotient_dot(&m, &IntersectionGraph::torus_graph(&m), "after"))];
            o.model = Some(m);
            o
        }
        Command::Unravel { model } => {
            let m = load(model)?;
            let pair = first_pair(&m)?;
            let (basic, _) = unravel(&m, &pair, 1)?;
            let (next, report) = unravel(&m, &pair, n)?;
            let mut o = Outcome::ok(None, &report);
            o.dots = vec![
                ("before", quotient_dot(&basic, &IntersectionGraph::torus_graph(&basic), "before")),
                ("after", quotient_dot(&next, &IntersectionGraph::torus_graph(&next), "after")),
            ];
            o.model = Some(next);
            o
        }
        Command::Pipeline { model } => {
            let m = load(model)?;
            let pair = first_pair(&m)?;
            let config = PipelineConfig { budget, ..PipelineConfig::default() };
            let (next, report) = theorem1_pipeline_with(&m, &pair, n, config)?;
            let mut o = Outcome::ok(None, &report);
            o.ok = report.is_tree();
            o.dots = vec![
                ("before", quotient_dot(&m, &graph_of(&m), "before")),
                ("after", quotient_dot(&next, &IntersectionGraph::cap_graph(&next), "after")),
            ];
            o.model = Some(next);
            o
        }
        Command::Certify { model } => {
            let m = load(model)?;
            match certify(&m.ledger) {
                Ok(cert) => {
                    let mut o = Outcome::ok(None, m.ledger.report(&cert, false));
                    o.ok = cert.is_success();
                    o
                }
                Err(e @ Error::IncompleteLedger { .. }) => {
                    let report = json!({ "verdict": "incomplete", "error": e.to_string(), "pending": m.ledger.obligations });
                    let mut o = Outcome::ok(None, report);
                    o.ok = false;
                    o
                }
                Err(e) => return Err(e),
            }
        }
        Command::Fuzz => fuzz(cli.seed, n, budget)?,
    };
    Ok(out)
}

/// A small randomized battery: label conservation and collision freedom of
/// distance splitting, girth after unraveling, and certificates.
fn fuzz(seed: u64, n: usize, budget: usize) -> Result<Outcome, Error> {
    let mut rng = gen::rng(seed);
    let mut failures = Vec::new();
    let rounds = 20;
    for i in 0..rounds {
        let spec = GropeSpec { height: 1 + i as u32 % 2, edges: 2 + i % 5, ..GropeSpec::default() };
        let (m, g) = gen::random_grope(&mut rng, spec)?;
        let (out, _) = split_to_distance_with(&m, g, n.min(3), budget)?;
        if out.label_set() != m.label_set() {
            failures.push(format!("round {i}: distance splitting changed the label set"));
        }
        if let Some(c) = collision_search(&out, n.min(3)) {
            failures.push(format!("round {i}: collision {c} survives distance splitting"));
        }

        let (m, pairs) = gen::planted_cycle(&mut rng, 3, 2)?;
        let (out, r) = unravel(&m, &pairs[0], n)?;
        if r.girth_after.map_or(false, |g| g < n) || !r.shift_is_cyclic() {
            failures.push(format!("round {i}: unraveled girth {:?} below {n}", r.girth_after));
        }
        let done = grope::handles::discharge_all(&grope::handles::clear_embedded_pairings(&out)?)?;
        let want = if n > 1 { Certificate::UpperTriangularUnits } else { Certificate::Identity };
        if certify(&done.ledger)? != want {
            failures.push(format!("round {i}: unraveled ledger does not certify {}", want.verdict()));
        }
    }
    let ok = failures.is_empty();
    let mut o = Outcome::ok(None, json!({ "seed": seed, "n": n, "rounds": rounds, "failures": failures }));
    o.ok = ok;
    Ok(o)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Error> {
    fs::write(dir.join(name), text).map_err(|e| Error::Malformed(format!("cannot write {}: {e}", dir.join(name).display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let mut report = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
    report.push('\n');
    print!("{report}");
    if let Some(dir) = &cli.out {
        let written = fs::create_dir_all(dir)
            .map_err(|e| Error::Malformed(format!("cannot create {}: {e}", dir.display())))
            .and_then(|_| write(dir, "report.json", &report))
            .and_then(|_| outcome.model.as_ref().map_or(Ok(()), |m| write(dir, "model.json", &m.to_json())))
            .and_then(|_| {
                if !cli.dot {
                    return Ok(());
                }
                outcome.dots.iter().try_for_each(|(name, text)| write(dir, &format!("{name}.dot"), text))
            });
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
