//! Seeded benchmark runs comparing the two search modes on generated
//! instances.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cost::ExtendedCost;
use crate::error::Result;
use crate::estimate::CliqueMode;
use crate::netcfg::{compile, generate, hard_flows_routable, GeneratorConfig, NetcfgInstance};
use crate::oracle::{oracle_solve, MAX_ORACLE_EVENTS};
use crate::solver::{solve, Mode, SolveConfig, SolveResult};

pub const CSV_HEADER: &str = "scenario,mode,t1,gamma1_k,gamma1_c,gamma_k,gamma_c,eta,zeta";

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub flows: Vec<usize>,
    pub modes: Vec<Mode>,
    pub trials: usize,
    pub timeout: Duration,
    pub seed: u64,
    pub clique_mode: CliqueMode,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            flows: vec![3, 4, 5],
            modes: vec![Mode::Gcdo, Mode::Cdito],
            trials: 20,
            timeout: Duration::from_secs(30),
            seed: 0,
            clique_mode: CliqueMode::Exact,
        }
    }
}

/// Seed of the `k`-th candidate instance of a scenario.
pub fn candidate_seed(base: u64, n_flows: usize, k: u64) -> u64 {
    base.wrapping_mul(1_000_003).wrapping_add((n_flows as u64) << 32).wrapping_add(k)
}

/// The first `count` generated instances whose undroppable flows each have a
/// usable path. Gives up after scanning `200 × count` seeds.
pub fn candidate_instances(n_flows: usize, base: u64, count: usize) -> Vec<(u64, NetcfgInstance)> {
    let mut out = Vec::new();
    for k in 0..(200 * count.max(1)) as u64 {
        if out.len() == count {
            break;
        }
        let seed = candidate_seed(base, n_flows, k);
        let inst = generate(&GeneratorConfig::new(n_flows, seed));
        if hard_flows_routable(&inst) {
            out.push((seed, inst));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeOutcome {
    pub mode: Mode,
    pub first_cost: Option<ExtendedCost>,
    pub first_time: Option<f64>,
    pub final_cost: ExtendedCost,
    pub proved_optimal: bool,
    pub explored: u64,
    pub g_calls: u64,
    pub zeta: f64,
}

impl ModeOutcome {
    fn from_result(mode: Mode, r: &SolveResult) -> Self {
        ModeOutcome {
            mode,
            first_cost: r.first_solution().map(|h| h.cost),
            first_time: r.first_solution().map(|h| h.elapsed),
            final_cost: r.best_cost,
            proved_optimal: r.proved_optimal,
            explored: r.stats.explored_orders,
            g_calls: r.stats.g_calls,
            zeta: r.stats.zeta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n_flows: usize,
    pub seed: u64,
    /// Some finite-cost order exists (by the oracle when small enough,
    /// otherwise by some mode finding one).
    pub feasible: bool,
    pub oracle_cost: Option<ExtendedCost>,
    pub outcomes: Vec<ModeOutcome>,
}

impl TrialRecord {
    pub fn outcome(&self, mode: Mode) -> Option<&ModeOutcome> {
        self.outcomes.iter().find(|o| o.mode == mode)
    }
}

pub fn run_trial(n_flows: usize, seed: u64, inst: &NetcfgInstance, cfg: &BenchConfig) -> Result<TrialRecord> {
    let mut outcomes = Vec::new();
    for &mode in &cfg.modes {
        let (p, mut th) = compile(inst)?;
        let sc = SolveConfig { mode, time_limit: cfg.timeout, clique_mode: cfg.clique_mode, ..SolveConfig::default() };
        let r = solve(&p, &mut th, sc)?;
        outcomes.push(ModeOutcome::from_result(mode, &r));
    }
    let oracle_cost = if inst.events <= MAX_ORACLE_EVENTS {
        let (p, mut th) = compile(inst)?;
        Some(oracle_solve(&p, &mut th)?.1)
    } else {
        None
    };
    let feasible = match oracle_cost {
        Some(c) => c.is_finite(),
        None => outcomes.iter().any(|o| o.final_cost.is_finite()),
    };
    Ok(TrialRecord { n_flows, seed, feasible, oracle_cost, outcomes })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scenario: usize,
    pub mode: Mode,
    pub t1: f64,
    pub gamma1: ExtendedCost,
    pub gamma: ExtendedCost,
    pub eta: usize,
    pub zeta: f64,
    pub included: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub trials: Vec<TrialRecord>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn mean_cost(xs: &[ExtendedCost]) -> ExtendedCost {
    if xs.is_empty() {
        return ExtendedCost::ZERO;
    }
    let k = xs.iter().map(|c| c.k as f64).sum::<f64>() / xs.len() as f64;
    let c = xs.iter().map(|c| c.c).sum::<f64>() / xs.len() as f64;
    ExtendedCost::new(k.round() as u32, c)
}

/// Averages over trials with a finite-cost order; the rest are counted as
/// skipped.
pub fn aggregate(scenario: usize, mode: Mode, trials: &[TrialRecord]) -> BenchRow {
    let ours: Vec<&TrialRecord> = trials.iter().filter(|t| t.n_flows == scenario).collect();
    let included: Vec<&ModeOutcome> = ours.iter().filter(|t| t.feasible).filter_map(|t| t.outcome(mode)).collect();
    let with_first: Vec<&ModeOutcome> = included.iter().copied().filter(|o| o.first_cost.is_some()).collect();
    let finals: Vec<ExtendedCost> = with_first.iter().map(|o| o.final_cost).collect();
    let firsts: Vec<ExtendedCost> = with_first.iter().filter_map(|o| o.first_cost).collect();
    BenchRow {
        scenario,
        mode,
        t1: mean(with_first.iter().filter_map(|o| o.first_time)),
        gamma1: mean_cost(&firsts),
        gamma: mean_cost(&finals),
        eta: included.iter().filter(|o| o.proved_optimal).count(),
        zeta: mean(included.iter().map(|o| o.zeta)),
        included: included.len(),
        skipped: ours.len() - ours.iter().filter(|t| t.feasible).count(),
    }
}

pub fn run_bench(cfg: &BenchConfig, mut progress: impl FnMut(&TrialRecord)) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for &n in &cfg.flows {
        for (seed, inst) in candidate_instances(n, cfg.seed, cfg.trials) {
            let t = run_trial(n, seed, &inst, cfg)?;
            progress(&t);
            report.trials.push(t);
        }
        for &mode in &cfg.modes {
            report.rows.push(aggregate(n, mode, &report.trials));
        }
    }
    Ok(report)
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Gcdo => "gcdo",
        Mode::Cdito => "cdito",
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{:.6},{},{:.6},{},{:.6},{},{:.6}",
            r.scenario,
            mode_name(r.mode),
            r.t1,
            r.gamma1.k,
            r.gamma1.c,
            r.gamma.k,
            r.gamma.c,
            r.eta,
            r.zeta
        );
    }
    s
}

pub fn to_table(rows: &[BenchRow]) -> String {
    let mut s = format!(
        "{:>6} {:>6} {:>10} {:>10} {:>10} {:>5} {:>8} {:>9} {:>8}\n",
        "flows", "mode", "t1 (s)", "gamma1", "gamma", "eta", "zeta", "included", "skipped"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>6} {:>6} {:>10.4} {:>10.3} {:>10.3} {:>5} {:>8.4} {:>9} {:>8}",
            r.scenario,
            mode_name(r.mode),
            r.t1,
            r.gamma1.c,
            r.gamma.c,
            r.eta,
            r.zeta,
            r.included,
            r.skipped
        );
    }
    s
}
