//! Anytime branch-and-bound over the total order tree.
//!
//! Each iteration estimates the current order from the manifested bounding
//! constraints, evaluates it only when the estimate is below the incumbent,
//! learns new bounds from the evaluation, and then moves on by whichever of
//! the standard move and the first reducing move ranks later.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounding::{init_bc, BoundId, BoundingConstraint, BoundingRegistry};
use crate::cost::ExtendedCost;
use crate::error::{Error, Result};
use crate::estimate::{estimate_manifested, CliqueMode, Estimate};
use crate::model::{OrderingProblem, Relaxation, TotalOrder};
use crate::pruning::{first_reducing_ids, Reducing};
use crate::theory::{evaluate_g, Theory};
use crate::tree::{OrderMove, SearchCursor};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Full cost-aware bounding.
    #[default]
    Gcdo,
    /// Only infinite-cost bounds are kept, so only hard conflicts prune.
    Cdito,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcdo" => Ok(Mode::Gcdo),
            "cdito" => Ok(Mode::Cdito),
            other => Err(Error::InvalidProblem(format!("unknown mode `{other}` (expected gcdo or cdito)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub mode: Mode,
    pub time_limit: Duration,
    pub g_call_limit: Option<u64>,
    pub trace: bool,
    pub clique_mode: CliqueMode,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            mode: Mode::Gcdo,
            time_limit: Duration::from_secs(30),
            g_call_limit: None,
            trace: false,
            clique_mode: CliqueMode::Exact,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: u64,
    pub explored_orders: u64,
    pub g_calls: u64,
    pub extracted_bounds: u64,
    pub registry_size: u64,
    pub zeta: f64,
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncumbentRecord {
    pub iteration: u64,
    pub elapsed: f64,
    pub cost: ExtendedCost,
    pub order: TotalOrder,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub best_order: Option<TotalOrder>,
    pub best_cost: ExtendedCost,
    pub relaxation: Relaxation,
    pub proved_optimal: bool,
    pub timed_out: bool,
    pub stats: SolveStats,
    pub incumbent_history: Vec<IncumbentRecord>,
}

impl SolveResult {
    pub fn first_solution(&self) -> Option<&IncumbentRecord> {
        self.incumbent_history.first()
    }
}

/// One loop iteration, as seen right before the move is taken.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub order: TotalOrder,
    pub level: usize,
    pub first_visit: bool,
    /// Witness of the estimate, after any bounds learnt this iteration.
    pub witness: Vec<u32>,
    /// Estimate before evaluation.
    pub estimate: ExtendedCost,
    /// Incumbent cost when the estimate was compared against it.
    pub incumbent_before: ExtendedCost,
    pub incumbent: ExtendedCost,
    pub g_called: bool,
    pub g: Option<ExtendedCost>,
    pub new_bounds: usize,
    pub standard_move: [usize; 2],
    /// `None` when no jump is required.
    pub reducing_move: Option<[usize; 2]>,
    pub chosen_move: [usize; 2],
}

fn pair(m: OrderMove) -> [usize; 2] {
    [m.i, m.j]
}

pub struct Solver<'a> {
    problem: &'a OrderingProblem,
    theory: &'a mut dyn Theory,
    config: SolveConfig,
    registry: BoundingRegistry,
}

impl<'a> Solver<'a> {
    pub fn new(problem: &'a OrderingProblem, theory: &'a mut dyn Theory, config: SolveConfig) -> Result<Self> {
        if problem.n() == 0 {
            return Err(Error::InvalidProblem("a problem needs at least one event".into()));
        }
        if config.time_limit.is_zero() {
            return Err(Error::InvalidProblem("time limit must be positive".into()));
        }
        let mut registry = BoundingRegistry::new(problem);
        let mode = config.mode;
        registry.ingest(init_bc(problem)?.into_iter().filter(|t| keeps(mode, t)));
        Ok(Solver { problem, theory, config, registry })
    }

    pub fn registry(&self) -> &BoundingRegistry {
        &self.registry
    }

    fn estimate(&self, order: &TotalOrder) -> (Vec<BoundId>, Estimate) {
        let manifested = self.registry.manifested_subset(order);
        let est = estimate_manifested(&self.registry, &manifested, self.config.clique_mode);
        (manifested, est)
    }

    pub fn run(&mut self, mut observer: impl FnMut(&TraceRecord)) -> SolveResult {
        let start = Instant::now();
        let n = self.problem.n();
        let mut cursor = SearchCursor::root(n);
        let mut fresh = true;
        let mut incumbent = ExtendedCost::INFINITY;
        let mut best: Option<(TotalOrder, Relaxation)> = None;
        let mut history = Vec::new();
        let mut stats = SolveStats::default();
        let mut proved_optimal = false;
        let mut timed_out = false;

        loop {
            if start.elapsed() >= self.config.time_limit {
                timed_out = true;
                break;
            }
            if self.config.g_call_limit.is_some_and(|lim| stats.g_calls >= lim) {
                break;
            }
            stats.iterations += 1;
            let order = cursor.current.clone();
            if fresh {
                stats.explored_orders += 1;
            }
            let (mut manifested, mut est) = self.estimate(&order);
            let incumbent_before = incumbent;
            let estimate_before = est.cost;
            let mut g_value = None;
            let mut new_bounds = 0;
            if fresh && est.cost < incumbent {
                let rel = evaluate_g(self.problem, &mut *self.theory, &order);
                stats.g_calls += 1;
                g_value = Some(rel.cost);
                let extracted: Vec<BoundingConstraint> =
                    self.theory.extract(&order).into_iter().filter(|t| keeps(self.config.mode, t)).collect();
                stats.extracted_bounds += extracted.len() as u64;
                new_bounds = self.registry.ingest(extracted);
                if rel.cost < incumbent {
                    incumbent = rel.cost;
                    history.push(IncumbentRecord {
                        iteration: stats.iterations,
                        elapsed: start.elapsed().as_secs_f64(),
                        cost: rel.cost,
                        order: order.clone(),
                    });
                    best = Some((order.clone(), rel));
                }
                (manifested, est) = self.estimate(&order);
            }

            // infinite bounds always justify a jump on their own, so they
            // join the witness even when they overlap it
            let mut d: BTreeSet<BoundId> = est.witness.iter().copied().collect();
            d.extend(manifested.iter().copied().filter(|&id| !self.registry.get(id).bound.cost.is_finite()));
            let d: Vec<BoundId> = d.into_iter().collect();

            let standard = cursor.next_move();
            let reducing = first_reducing_ids(&order, &self.registry, &d, incumbent);
            let chosen = match reducing {
                Reducing::Jump(m) if m.rank(n) > standard.rank(n) => m,
                _ => standard,
            };
            observer(&TraceRecord {
                iteration: stats.iterations,
                level: order.level(),
                order,
                first_visit: fresh,
                witness: est.witness.iter().map(|b| b.0).collect(),
                estimate: estimate_before,
                incumbent_before,
                incumbent,
                g_called: g_value.is_some(),
                g: g_value,
                new_bounds,
                standard_move: pair(standard),
                reducing_move: reducing.as_move().map(pair),
                chosen_move: pair(chosen),
            });
            if chosen.is_backtrack(n) {
                if !cursor.backtrack() {
                    proved_optimal = true;
                    break;
                }
                fresh = false;
            } else {
                cursor.advance(chosen).expect("chosen moves are never ranked below the standard move");
                fresh = true;
            }
        }

        stats.registry_size = self.registry.len() as u64;
        stats.elapsed = start.elapsed().as_secs_f64();
        stats.zeta = if stats.explored_orders == 0 { 0.0 } else { stats.g_calls as f64 / stats.explored_orders as f64 };
        let (best_order, relaxation) = match best {
            Some((o, r)) => (Some(o), r),
            None => (None, Relaxation::default()),
        };
        SolveResult {
            best_order,
            best_cost: incumbent,
            relaxation,
            proved_optimal,
            timed_out,
            stats,
            incumbent_history: history,
        }
    }
}

fn keeps(mode: Mode, theta: &BoundingConstraint) -> bool {
    match mode {
        Mode::Gcdo => true,
        Mode::Cdito => !theta.cost.is_finite(),
    }
}

pub fn solve(problem: &OrderingProblem, theory: &mut dyn Theory, config: SolveConfig) -> Result<SolveResult> {
    Ok(Solver::new(problem, theory, config)?.run(|_| {}))
}

pub fn solve_traced(
    problem: &OrderingProblem,
    theory: &mut dyn Theory,
    config: SolveConfig,
    observer: impl FnMut(&TraceRecord),
) -> Result<SolveResult> {
    Ok(Solver::new(problem, theory, config)?.run(observer))
}
