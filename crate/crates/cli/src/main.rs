use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ordo::bench::{run_bench, to_csv, to_table, BenchConfig};
use ordo::netcfg::{compile, generate, motivating, GeneratorConfig, NetcfgInstance};
use ordo::oracle::oracle_solve;
use ordo::solver::{Mode, SolveConfig, SolveResult, Solver, TraceRecord};
use ordo::stn::StnTheory;
use ordo::theory::Theory;
use ordo::tree::enumerate_tree;
use ordo::{BoundingRegistry, CliqueMode, Error, OrderingProblem};

const EXIT_INVALID: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const MAX_TREE_EVENTS: usize = 10;

#[derive(Parser)]
#[command(name = "ordo", version, about = "Optimal total ordering under relaxable constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file (generic ordering problem or network instance).
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value = "gcdo")]
        mode: Mode,
        /// Seconds.
        #[arg(long, default_value_t = 30.0)]
        timeout: f64,
        /// Write one JSON record per iteration.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the result JSON here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every learnt bounding constraint.
        #[arg(long)]
        dump_bounds: Option<PathBuf>,
        #[arg(long, default_value = "exact", value_parser = parse_clique)]
        clique: CliqueMode,
        /// Stop after this many sub-solver evaluations.
        #[arg(long)]
        g_limit: Option<u64>,
    },
    /// Generate a random network instance.
    Generate {
        #[arg(long)]
        flows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare both search modes on generated instances.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        flows: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "gcdo,cdito")]
        modes: Vec<Mode>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Seconds per solve.
        #[arg(long, default_value_t = 30.0)]
        timeout: f64,
        /// Base seed; ORDO_SEED overrides it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the search tree traversal as `rank,permutation,level`.
    Tree {
        #[arg(long)]
        n: usize,
    },
    /// Brute-force optimum over all permutations (at most 8 events).
    Oracle {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Replay the built-in motivating example and print an iteration table.
    TraceFixture {
        #[arg(long, default_value = "gcdo")]
        mode: Mode,
    },
}

fn parse_clique(s: &str) -> Result<CliqueMode, String> {
    match s {
        "exact" => Ok(CliqueMode::Exact),
        "greedy" => Ok(CliqueMode::Greedy),
        other => Err(format!("unknown clique mode `{other}` (expected exact or greedy)")),
    }
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Timeout,
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Other(e.to_string()),
            e => Failure::Invalid(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Other(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Network instances are recognised by their `topology` field; anything else
/// is read as a generic problem whose theory constraints are temporal.
fn load_problem(path: &Path) -> Result<(OrderingProblem, Box<dyn Theory>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("malformed JSON: {e}")))?;
    if doc.get("topology").is_some() {
        let inst = NetcfgInstance::from_json(&text)?;
        let (p, th) = compile(&inst)?;
        Ok((p, Box::new(th)))
    } else {
        let p = OrderingProblem::from_json(&text)?;
        let th = StnTheory::from_problem(&p, None)?;
        Ok((p, Box::new(th)))
    }
}

fn seconds(s: f64, flag: &str) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(s)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| Failure::Invalid(format!("--{flag} must be a positive number of seconds, got {s}")))
}

fn result_json(problem: &OrderingProblem, r: &SolveResult) -> Value {
    let relaxed: Vec<&str> = r.relaxation.relaxed.iter().map(|&id| problem.name(id)).collect();
    json!({
        "best_order": r.best_order,
        "cost": r.best_cost,
        "proved_optimal": r.proved_optimal,
        "timed_out": r.timed_out,
        "relaxed": relaxed,
        "stats": r.stats,
        "incumbent_history": r.incumbent_history,
    })
}

fn bounds_json(problem: &OrderingProblem, reg: &BoundingRegistry) -> Value {
    let items: Vec<Value> = reg
        .iter()
        .map(|e| {
            let names: Vec<&str> = e.bound.constraint_set().iter().map(|&id| problem.name(id)).collect();
            json!({
                "id": e.id.0,
                "partial_orders": e.bound.partial_orders(),
                "constraints": names,
                "cost": e.bound.cost,
                "source": e.bound.source,
            })
        })
        .collect();
    Value::Array(items)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    problem: &Path,
    mode: Mode,
    timeout: f64,
    trace: Option<&Path>,
    out: Option<&Path>,
    dump_bounds: Option<&Path>,
    clique: CliqueMode,
    g_limit: Option<u64>,
) -> Result<(), Failure> {
    let (p, mut th) = load_problem(problem)?;
    let config = SolveConfig {
        mode,
        time_limit: seconds(timeout, "timeout")?,
        g_call_limit: g_limit,
        trace: trace.is_some(),
        clique_mode: clique,
    };
    let mut trace_out = match trace {
        Some(path) => Some(BufWriter::new(fs::File::create(path).map_err(|e| io_err(path, e))?)),
        None => None,
    };
    let mut trace_err = None;
    let mut solver = Solver::new(&p, th.as_mut(), config)?;
    let r = solver.run(|rec: &TraceRecord| {
        if let Some(w) = trace_out.as_mut() {
            let line = serde_json::to_string(rec).expect("trace records serialize");
            if let Err(e) = writeln!(w, "{line}") {
                trace_err.get_or_insert(e);
            }
        }
    });
    if let Some(mut w) = trace_out {
        if let Err(e) = w.flush() {
            trace_err.get_or_insert(e);
        }
    }
    if let (Some(e), Some(path)) = (trace_err, trace) {
        return Err(io_err(path, e));
    }
    if let Some(path) = dump_bounds {
        let text = serde_json::to_string_pretty(&bounds_json(&p, solver.registry())).expect("bounds serialize");
        write_file(path, &text)?;
    }
    let text = serde_json::to_string_pretty(&result_json(&p, &r)).expect("result serializes");
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    println!("{text}");
    if r.timed_out && r.best_order.is_none() {
        return Err(Failure::Timeout);
    }
    Ok(())
}

fn cmd_generate(flows: usize, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    if flows == 0 {
        return Err(Failure::Invalid("--flows must be at least 1".into()));
    }
    let text = generate(&GeneratorConfig::new(flows, seed)).to_json();
    match out {
        Some(path) => write_file(path, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn env_seed(default: u64) -> Result<u64, Failure> {
    match std::env::var("ORDO_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Failure::Invalid(format!("ORDO_SEED must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(default),
    }
}

fn cmd_bench(flows: Vec<usize>, modes: Vec<Mode>, trials: usize, timeout: f64, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    if flows.contains(&0) {
        return Err(Failure::Invalid("--flows entries must be at least 1".into()));
    }
    let cfg = BenchConfig {
        flows,
        modes,
        trials,
        timeout: seconds(timeout, "timeout")?,
        seed: env_seed(seed)?,
        clique_mode: CliqueMode::Exact,
    };
    let report = run_bench(&cfg, |t| {
        let costs: Vec<String> = t.outcomes.iter().map(|o| format!("{:?}: cost={} g={} explored={} zeta={:.4}", o.mode, o.final_cost, o.g_calls, o.explored, o.zeta)).collect();
        eprintln!("flows={} seed={} feasible={} {}", t.n_flows, t.seed, t.feasible, costs.join(" "));
    })?;
    let csv = to_csv(&report.rows);
    if let Some(path) = out {
        write_file(path, &csv)?;
    }
    eprint!("{}", to_table(&report.rows));
    print!("{csv}");
    Ok(())
}

fn cmd_tree(n: usize) -> Result<(), Failure> {
    if n == 0 || n > MAX_TREE_EVENTS {
        return Err(Failure::Invalid(format!("--n must be between 1 and {MAX_TREE_EVENTS}, got {n}")));
    }
    let stdout = std::io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    for (rank, order) in enumerate_tree(n).enumerate() {
        writeln!(w, "{},{},{}", rank + 1, order, order.level()).map_err(|e| Failure::Other(e.to_string()))?;
    }
    w.flush().map_err(|e| Failure::Other(e.to_string()))
}

fn cmd_oracle(problem: &Path) -> Result<(), Failure> {
    let (p, mut th) = load_problem(problem)?;
    let (order, cost) = oracle_solve(&p, th.as_mut())?;
    let best = if cost.is_finite() { Some(order) } else { None };
    let text = serde_json::to_string_pretty(&json!({ "best_order": best, "cost": cost })).expect("oracle result serializes");
    println!("{text}");
    Ok(())
}

fn fmt_move(m: [usize; 2]) -> String {
    format!("({}→{})", m[0], m[1])
}

fn cmd_trace_fixture(mode: Mode) -> Result<(), Failure> {
    let (p, mut th) = compile(&motivating())?;
    let config = SolveConfig { mode, trace: true, ..SolveConfig::default() };
    let mut rows = Vec::new();
    let r = Solver::new(&p, &mut th, config)?.run(|rec| rows.push(rec.clone()));
    println!(
        "{:>4} {:>7} {:>5} {:>14} {:>8} {:>8} {:>6} {:>8} {:>8} {:>8}",
        "iter", "order", "level", "D", "est", "inc", "g", "std", "reduce", "chosen"
    );
    for rec in &rows {
        let d: Vec<String> = rec.witness.iter().map(|b| b.to_string()).collect();
        let g = rec.g.map(|g| g.to_string()).unwrap_or_else(|| "-".into());
        let red = rec.reducing_move.map(fmt_move).unwrap_or_else(|| "-".into());
        println!(
            "{:>4} {:>7} {:>5} {:>14} {:>8} {:>8} {:>6} {:>8} {:>8} {:>8}",
            rec.iteration,
            rec.order.to_string(),
            rec.level,
            format!("{{{}}}", d.join(",")),
            rec.estimate.to_string(),
            rec.incumbent.to_string(),
            g,
            fmt_move(rec.standard_move),
            red,
            fmt_move(rec.chosen_move),
        );
    }
    let best = r.best_order.map(|o| o.to_string()).unwrap_or_else(|| "none".into());
    println!("best {best} cost {} proved_optimal {} g_calls {}", r.best_cost, r.proved_optimal, r.stats.g_calls);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { problem, mode, timeout, trace, out, dump_bounds, clique, g_limit } => cmd_solve(
            &problem,
            mode,
            timeout,
            trace.as_deref(),
            out.as_deref(),
            dump_bounds.as_deref(),
            clique,
            g_limit,
        ),
        Command::Generate { flows, seed, out } => cmd_generate(flows, seed, out.as_deref()),
        Command::Bench { flows, modes, trials, timeout, seed, out } => cmd_bench(flows, modes, trials, timeout, seed, out.as_deref()),
        Command::Tree { n } => cmd_tree(n),
        Command::Oracle { problem } => cmd_oracle(&problem),
        Command::TraceFixture { mode } => cmd_trace_fixture(mode),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Timeout) => {
            eprintln!("error: time limit reached before any solution was found");
            ExitCode::from(EXIT_TIMEOUT)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
