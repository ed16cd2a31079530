//! `efx` — command-line front end for the EFX orientation toolkit.
//!
//! Exit codes across all subcommands: 0 for a positive verdict (solved,
//! EFX, exists, verified), 1 for a negative one, 2 for malformed input or
//! parameters, 3 when the oracle's representative budget is exhausted.
//! Results go to stdout (or `-o FILE`); diagnostics go to stderr.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use efx_core::fairness::envy_report;
use efx_core::generate::{generate, GenerateError, GenerateOptions};
use efx_core::instance::Instance;
use efx_core::oracle::{
    all_efx_orientations, count_efx_orientations, exists_efx_orientation, representative_count,
    Constraints, OracleError, DEFAULT_BUDGET,
};
use efx_core::orientation::PartialOrientation;
use efx_core::rational::Rational;
use efx_core::reduction::{build_instance, verify_reduction_properties};
use efx_core::solver::{solve, SolveOutcome};
use efx_core::structure::{
    analyze_heavy_components, connected_components, has_forbidden_structure, is_bipartite,
};

#[derive(Parser)]
#[command(
    name = "efx",
    version,
    about = "EFX orientations of bi-valued multigraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural classification report for an instance.
    Analyze(AnalyzeArgs),
    /// Construct an EFX orientation, or report why none exists.
    Solve(SolveArgs),
    /// Verify an orientation against an instance.
    Check(CheckArgs),
    /// Exhaustive EFX search over all orientations (small instances).
    Oracle(OracleArgs),
    /// Compile a NOT/OR circuit into a hardness instance.
    Reduce(ReduceArgs),
    /// Sample a random instance.
    Gen(GenArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Emit Graphviz DOT instead of the JSON report.
    #[arg(long)]
    dot: bool,
    /// Write the output here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Write the orientation here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// On refusal, decide exhaustively with the oracle (may be slow).
    #[arg(long)]
    oracle_fallback: bool,
    /// Representative budget for the fallback search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct CheckArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Orientation JSON file.
    orientation: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Print the first EFX orientation found (default mode).
    #[arg(long, conflicts_with_all = ["all", "count"])]
    exists: bool,
    /// Print every EFX representative as a JSON array.
    #[arg(long, conflicts_with = "count")]
    all: bool,
    /// Print the number of EFX representatives.
    #[arg(long)]
    count: bool,
    /// Force edge E toward vertex V (repeatable).
    #[arg(long, value_name = "E=V")]
    fix: Vec<String>,
    /// Abort when the symmetry-reduced search space exceeds this.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Write the result here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    /// Circuit text file (`input X` / `Y = NOT X` / `Z = OR X Y` / `output Z`).
    circuit: PathBuf,
    /// Parallel budget q (at least 2).
    #[arg(short = 'q', long = "multiplicity")]
    q: usize,
    /// Heavy weight; defaults to q + 1.
    #[arg(long)]
    alpha: Option<Rational>,
    /// Light weight; defaults to 1.
    #[arg(long)]
    beta: Option<Rational>,
    /// Write the instance here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the wire/gadget map here.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Check the structural properties and fail if any is violated.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    vertices: usize,
    /// Defaults to twice the vertex count.
    #[arg(long)]
    edges: Option<usize>,
    /// Cap on parallel edges per endpoint pair.
    #[arg(long, default_value_t = 3)]
    multiplicity: usize,
    /// Probability that a sampled edge is heavy.
    #[arg(long, default_value_t = 0.4)]
    heavy_density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "3")]
    alpha: Rational,
    #[arg(long, default_value = "1")]
    beta: Rational,
    /// Wire a random spanning tree first.
    #[arg(long)]
    connected: bool,
    /// Reject draws the direct solver would refuse.
    #[arg(long)]
    avoid_forbidden: bool,
    /// Write the instance here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Solve(args) => run_solve(args),
        Command::Check(args) => run_check(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Reduce(args) => run_reduce(args),
        Command::Gen(args) => run_gen(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            use std::io::Write;
            if let Err(err) = writeln!(std::io::stdout().lock(), "{text}") {
                // A closed reader (e.g. piping into `head`) is not an error.
                if err.kind() == std::io::ErrorKind::BrokenPipe {
                    std::process::exit(0);
                }
                return Err(err).context("writing to stdout");
            }
        }
    }
    Ok(())
}

fn run_analyze(args: AnalyzeArgs) -> anyhow::Result<u8> {
    let inst = load_instance(&args.instance)?;
    let text = if args.dot {
        dot_export(&inst)
    } else {
        let report = serde_json::json!({
            "vertices": inst.vertex_count(),
            "edges": inst.edge_count(),
            "alpha": inst.alpha(),
            "beta": inst.beta(),
            "multiplicity": inst.multiplicity(),
            "bipartite": is_bipartite(&inst).is_some(),
            "connected_components": connected_components(&inst).len(),
            "forbidden_structure": has_forbidden_structure(&inst),
            "heavy_components": analyze_heavy_components(&inst),
        });
        serde_json::to_string_pretty(&report).expect("report serializes")
    };
    emit(&text, args.output.as_deref())?;
    Ok(0)
}

fn dot_export(inst: &Instance) -> String {
    let mut out = String::from("graph instance {\n");
    for v in 0..inst.vertex_count() {
        writeln!(out, "  {v};").expect("write to string");
    }
    for e in inst.edges() {
        let style = if e.is_heavy() { "solid" } else { "dashed" };
        writeln!(
            out,
            "  {} -- {} [style={style}, label=\"{}\"];",
            e.u,
            e.v,
            inst.weight(e.id)
        )
        .expect("write to string");
    }
    out.push('}');
    out
}

fn run_solve(args: SolveArgs) -> anyhow::Result<u8> {
    let inst = load_instance(&args.instance)?;
    match solve(&inst) {
        SolveOutcome::Oriented(pi) => {
            emit(&pi.to_canonical_json(), args.output.as_deref())?;
            Ok(0)
        }
        SolveOutcome::Refused(witness) => {
            if !args.oracle_fallback {
                eprintln!(
                    "refused: heavy component {witness:?} is a non-trivial odd multitree; \
                     rerun with --oracle-fallback to decide exhaustively"
                );
                return Ok(1);
            }
            match exists_efx_orientation(&inst, &Constraints::none(), args.budget) {
                Ok(Some(pi)) => {
                    emit(&pi.to_canonical_json(), args.output.as_deref())?;
                    Ok(0)
                }
                Ok(None) => {
                    eprintln!("no EFX orientation exists (exhaustive)");
                    Ok(1)
                }
                Err(err @ OracleError::BudgetExceeded { .. }) => {
                    eprintln!("oracle fallback aborted: {err}");
                    Ok(3)
                }
                Err(err) => Err(err.into()),
            }
        }
    }
}

fn run_check(args: CheckArgs) -> anyhow::Result<u8> {
    let inst = load_instance(&args.instance)?;
    let text = fs::read_to_string(&args.orientation)
        .with_context(|| format!("reading {}", args.orientation.display()))?;
    let pi = PartialOrientation::from_json(&text, &inst)
        .with_context(|| format!("parsing {}", args.orientation.display()))?;
    let report = envy_report(&inst, &pi);
    emit(
        &serde_json::to_string_pretty(&report).expect("report serializes"),
        args.output.as_deref(),
    )?;
    Ok(if report.efx { 0 } else { 1 })
}

fn parse_fixes(inst: &Instance, fixes: &[String]) -> anyhow::Result<Constraints> {
    let mut pairs = Vec::with_capacity(fixes.len());
    for raw in fixes {
        let (edge, owner) = raw
            .split_once('=')
            .with_context(|| format!("--fix {raw}: expected EDGE=VERTEX"))?;
        let edge: usize = edge
            .trim()
            .parse()
            .with_context(|| format!("--fix {raw}: bad edge id"))?;
        let owner: usize = owner
            .trim()
            .parse()
            .with_context(|| format!("--fix {raw}: bad vertex id"))?;
        pairs.push((edge, owner));
    }
    Constraints::from_pairs(inst, pairs).context("conflicting or invalid --fix")
}

fn run_oracle(args: OracleArgs) -> anyhow::Result<u8> {
    let inst = load_instance(&args.instance)?;
    let constraints = parse_fixes(&inst, &args.fix)?;
    let reps = representative_count(&inst, &constraints)?;
    eprintln!("{reps} representatives under symmetry reduction");
    let budget_exit = |err: OracleError| -> anyhow::Result<u8> {
        if matches!(err, OracleError::BudgetExceeded { .. }) {
            eprintln!("aborted: {err}");
            Ok(3)
        } else {
            Err(err.into())
        }
    };
    if args.count {
        match count_efx_orientations(&inst, &constraints, args.budget) {
            Ok(count) => {
                emit(&count.to_string(), args.output.as_deref())?;
                Ok(if count > 0 { 0 } else { 1 })
            }
            Err(err) => budget_exit(err),
        }
    } else if args.all {
        match all_efx_orientations(&inst, &constraints, args.budget) {
            Ok(all) => {
                let values: Vec<serde_json::Value> = all
                    .iter()
                    .map(|pi| {
                        serde_json::from_str(&pi.to_canonical_json())
                            .expect("orientation round-trips")
                    })
                    .collect();
                emit(
                    &serde_json::to_string(&values).expect("array serializes"),
                    args.output.as_deref(),
                )?;
                Ok(if values.is_empty() { 1 } else { 0 })
            }
            Err(err) => budget_exit(err),
        }
    } else {
        match exists_efx_orientation(&inst, &constraints, args.budget) {
            Ok(Some(pi)) => {
                emit(&pi.to_canonical_json(), args.output.as_deref())?;
                Ok(0)
            }
            Ok(None) => {
                eprintln!("no EFX orientation satisfies the constraints");
                Ok(1)
            }
            Err(err) => budget_exit(err),
        }
    }
}

fn run_reduce(args: ReduceArgs) -> anyhow::Result<u8> {
    let text = fs::read_to_string(&args.circuit)
        .with_context(|| format!("reading {}", args.circuit.display()))?;
    let circuit = efx_core::circuit::parse_circuit(&text)
        .with_context(|| format!("parsing {}", args.circuit.display()))?;
    let alpha = args
        .alpha
        .unwrap_or_else(|| Rational::from_integer(args.q as i128 + 1));
    let beta = args.beta.unwrap_or_else(|| Rational::from_integer(1));
    let (inst, map) = build_instance(&circuit, args.q, alpha, beta)?;
    emit(&inst.to_canonical_json(), args.output.as_deref())?;
    if let Some(path) = &args.map {
        fs::write(path, format!("{}\n", map.to_json()))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if args.verify {
        let report = verify_reduction_properties(&inst, &map);
        eprintln!(
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        );
        if !report.all_pass() {
            return Ok(1);
        }
    }
    Ok(0)
}

fn run_gen(args: GenArgs) -> anyhow::Result<u8> {
    let edges = args.edges.unwrap_or(args.vertices * 2);
    let mut opts = GenerateOptions::new(args.vertices, edges, args.seed);
    opts.max_multiplicity = args.multiplicity;
    opts.heavy_density = args.heavy_density;
    opts.alpha = args.alpha;
    opts.beta = args.beta;
    opts.connected = args.connected;
    opts.avoid_forbidden = args.avoid_forbidden;
    match generate(&opts) {
        Ok(inst) => {
            emit(&inst.to_canonical_json(), args.output.as_deref())?;
            Ok(0)
        }
        Err(err @ GenerateError::Exhausted { .. }) => {
            eprintln!("{err}");
            Ok(1)
        }
        Err(err) => Err(err.into()),
    }
}
