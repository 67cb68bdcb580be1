//! Simple temporal networks: consistency by negative-cycle detection, order
//! partial orders behind a cycle, and optimal relax-or-keep relaxation of
//! temporal constraints.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bounding::{BoundSource, BoundingConstraint};
use crate::cost::ExtendedCost;
use crate::error::{Error, Result};
use crate::model::{ConstraintId, ConstraintKind, Event, OrderingProblem, PartialOrder, Relaxation, TotalOrder, Weight};
use crate::theory::Theory;

const EPS: f64 = 1e-9;

/// Payload of a temporal theory constraint: `lower ≤ to − from ≤ upper`.
/// Event `0` is the time origin. A missing `upper` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemporalSpec {
    pub from: Event,
    pub to: Event,
    pub lower: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TemporalConstraint {
    pub id: ConstraintId,
    pub from: Event,
    pub to: Event,
    pub lower: f64,
    pub upper: f64,
    pub weight: Weight,
}

impl TemporalConstraint {
    pub fn new(id: ConstraintId, spec: TemporalSpec, weight: Weight) -> Result<Self> {
        let upper = spec.upper.unwrap_or(f64::INFINITY);
        if !spec.lower.is_finite() || upper.is_nan() || spec.lower > upper {
            return Err(Error::InvalidProblem(format!(
                "temporal bounds [{}, {}] of constraint {} are not an interval",
                spec.lower, upper, id.0
            )));
        }
        if spec.from == spec.to {
            return Err(Error::InvalidProblem(format!("temporal constraint {} relates event {} to itself", id.0, spec.from)));
        }
        Ok(TemporalConstraint { id, from: spec.from, to: spec.to, lower: spec.lower, upper, weight })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// Index into the constraint list the network was built from.
    Constraint(usize),
    /// `after − before ≥ 0` from the total order.
    Induced { before: Event, after: Event },
    /// Every event at or after the origin, and before the horizon.
    Structural,
}

/// `t(to) − t(from) ≤ weight`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub from: Event,
    pub to: Event,
    pub weight: f64,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NegativeCycle {
    pub edges: Vec<Edge>,
    pub total_weight: f64,
}

impl NegativeCycle {
    /// Constraint indices taking part, sorted.
    pub fn constraints(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .edges
            .iter()
            .filter_map(|e| match e.kind {
                EdgeKind::Constraint(c) => Some(c),
                _ => None,
            })
            .collect();
        set.into_iter().collect()
    }

    fn key(&self) -> Vec<EdgeKind> {
        let mut k: Vec<EdgeKind> = self.edges.iter().map(|e| e.kind).collect();
        k.sort_unstable();
        k
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Consistency {
    Consistent,
    Inconsistent(NegativeCycle),
}

/// Distance graph over the origin `0` and events `1..=n`.
#[derive(Clone, Debug)]
pub struct Stn {
    n: usize,
    edges: Vec<Edge>,
}

impl Stn {
    /// `precedences` are `(before, after)` pairs imposed as `after − before ≥ 0`.
    pub fn build(
        n: usize,
        constraints: &[TemporalConstraint],
        active: impl Fn(usize) -> bool,
        precedences: &[(Event, Event)],
        horizon: Option<f64>,
    ) -> Stn {
        let mut edges = Vec::new();
        for e in 1..=n as Event {
            edges.push(Edge { from: e, to: 0, weight: 0.0, kind: EdgeKind::Structural });
            if let Some(h) = horizon {
                edges.push(Edge { from: 0, to: e, weight: h, kind: EdgeKind::Structural });
            }
        }
        for &(before, after) in precedences {
            edges.push(Edge { from: after, to: before, weight: 0.0, kind: EdgeKind::Induced { before, after } });
        }
        for (idx, c) in constraints.iter().enumerate() {
            if !active(idx) {
                continue;
            }
            if c.upper.is_finite() {
                edges.push(Edge { from: c.from, to: c.to, weight: c.upper, kind: EdgeKind::Constraint(idx) });
            }
            edges.push(Edge { from: c.to, to: c.from, weight: -c.lower, kind: EdgeKind::Constraint(idx) });
        }
        Stn { n, edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Bellman–Ford from a virtual source attached to every vertex.
    pub fn check_consistency(&self) -> Consistency {
        let v = self.n + 1;
        let mut dist = vec![0.0f64; v];
        let mut pred: Vec<Option<usize>> = vec![None; v];
        let mut last = None;
        for _ in 0..v {
            last = None;
            for (idx, e) in self.edges.iter().enumerate() {
                let cand = dist[e.from as usize] + e.weight;
                if cand < dist[e.to as usize] - EPS {
                    dist[e.to as usize] = cand;
                    pred[e.to as usize] = Some(idx);
                    last = Some(e.to as usize);
                }
            }
            if last.is_none() {
                return Consistency::Consistent;
            }
        }
        let mut x = last.expect("a relaxation happened in the final pass");
        for _ in 0..v {
            x = self.edges[pred[x].expect("relaxed vertices have predecessors")].from as usize;
        }
        let start = x;
        let mut rev = Vec::new();
        loop {
            let e = self.edges[pred[x].expect("cycle vertices have predecessors")];
            rev.push(e);
            x = e.from as usize;
            if x == start {
                break;
            }
        }
        rev.reverse();
        let total_weight = rev.iter().map(|e| e.weight).sum();
        Consistency::Inconsistent(NegativeCycle { edges: rev, total_weight })
    }

    /// Earliest consistent time of every vertex (origin at 0), or `None`
    /// when inconsistent.
    pub fn earliest_schedule(&self) -> Option<Vec<f64>> {
        if self.check_consistency() != Consistency::Consistent {
            return None;
        }
        // earliest t(e) = −(shortest distance from e to the origin)
        let v = self.n + 1;
        let mut dist = vec![f64::INFINITY; v];
        dist[0] = 0.0;
        for _ in 0..v {
            let mut changed = false;
            for e in &self.edges {
                let cand = dist[e.to as usize] + e.weight;
                if cand < dist[e.from as usize] - EPS {
                    dist[e.from as usize] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Some(dist.iter().map(|&d| if d.is_finite() { -d } else { 0.0 }).collect())
    }
}

/// Consecutive-event precedences of a total order.
pub fn order_precedences(order: &TotalOrder) -> Vec<(Event, Event)> {
    order.events().windows(2).map(|w| (w[0], w[1])).collect()
}

/// Partial orders of the total order that the cycle depends on. A run of
/// consecutive order-induced edges only needs its two ends ordered, so each
/// run becomes one partial order.
pub fn extract_po_t(cycle: &NegativeCycle) -> Vec<PartialOrder> {
    let is_induced = |e: &Edge| matches!(e.kind, EdgeKind::Induced { .. });
    let len = cycle.edges.len();
    let Some(anchor) = cycle.edges.iter().position(|e| !is_induced(e)) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut run: Option<(Event, Event)> = None;
    for step in 1..=len {
        let e = &cycle.edges[(anchor + step) % len];
        match e.kind {
            // edges run from later to earlier events
            EdgeKind::Induced { .. } => {
                run = Some(match run {
                    None => (e.from, e.to),
                    Some((latest, _)) => (latest, e.to),
                });
            }
            _ => {
                if let Some((latest, earliest)) = run.take() {
                    out.push(PartialOrder::new(earliest, latest));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Result of an optimal relaxation together with every distinct negative
/// cycle met along the way.
#[derive(Clone, Debug, Default)]
pub struct TemporalOutcome {
    pub relaxed: Vec<usize>,
    pub cost: ExtendedCost,
    pub cycles: Vec<NegativeCycle>,
}

#[derive(PartialEq)]
struct Node {
    cost: ExtendedCost,
    relaxed: Vec<usize>,
}

impl Eq for Node {}

impl Ord for Node {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .cmp(&self.cost)
            .then_with(|| other.relaxed.len().cmp(&self.relaxed.len()))
            .then_with(|| other.relaxed.cmp(&self.relaxed))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cheapest set of constraints (indices into `constraints`) to drop so the
/// network with the given precedences is consistent. Best-first over
/// relaxation sets, branching on the constraints of each negative cycle.
pub fn optimal_temporal_relaxation(
    n: usize,
    constraints: &[TemporalConstraint],
    precedences: &[(Event, Event)],
    horizon: Option<f64>,
) -> TemporalOutcome {
    let mut heap = BinaryHeap::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut cycles: Vec<NegativeCycle> = Vec::new();
    let mut cycle_keys: HashSet<Vec<EdgeKind>> = HashSet::new();
    heap.push(Node { cost: ExtendedCost::ZERO, relaxed: Vec::new() });
    seen.insert(Vec::new());
    while let Some(node) = heap.pop() {
        let stn = Stn::build(n, constraints, |i| node.relaxed.binary_search(&i).is_err(), precedences, horizon);
        match stn.check_consistency() {
            Consistency::Consistent => {
                return TemporalOutcome { relaxed: node.relaxed, cost: node.cost, cycles };
            }
            Consistency::Inconsistent(cycle) => {
                for c in cycle.constraints() {
                    let mut next = node.relaxed.clone();
                    let at = next.binary_search(&c).unwrap_err();
                    next.insert(at, c);
                    if seen.insert(next.clone()) {
                        heap.push(Node { cost: node.cost + constraints[c].weight.cost(), relaxed: next });
                    }
                }
                if cycle_keys.insert(cycle.key()) {
                    cycles.push(cycle);
                }
            }
        }
    }
    // only order and structural edges left, which are always consistent
    unreachable!("dropping every constraint leaves a consistent network")
}

/// One bound per distinct cycle: its order partial orders, its constraints,
/// and the optimal relaxation of those constraints under just those partial
/// orders.
pub fn extract_temporal_bounds(
    n: usize,
    constraints: &[TemporalConstraint],
    horizon: Option<f64>,
    cycles: &[NegativeCycle],
) -> Vec<BoundingConstraint> {
    let mut out = Vec::new();
    for cycle in cycles {
        let pos = extract_po_t(cycle);
        let members = cycle.constraints();
        let sub: Vec<TemporalConstraint> = members.iter().map(|&i| constraints[i]).collect();
        let prec: Vec<(Event, Event)> = pos.iter().map(|po| (po.before, po.after)).collect();
        let cost = optimal_temporal_relaxation(n, &sub, &prec, horizon).cost;
        let cs = members.iter().map(|&i| constraints[i].id).collect();
        if let Ok(theta) = BoundingConstraint::new(pos, cs, cost, BoundSource::Temporal) {
            out.push(theta);
        }
    }
    out
}

/// Temporal theory for generic problems whose theory constraints are all
/// temporal.
#[derive(Clone, Debug)]
pub struct StnTheory {
    n: usize,
    constraints: Vec<TemporalConstraint>,
    horizon: Option<f64>,
    last: Option<(TotalOrder, TemporalOutcome)>,
}

impl StnTheory {
    pub fn new(n: usize, constraints: Vec<TemporalConstraint>, horizon: Option<f64>) -> Self {
        StnTheory { n, constraints, horizon, last: None }
    }

    pub fn from_problem(problem: &OrderingProblem, horizon: Option<f64>) -> Result<Self> {
        let mut constraints = Vec::new();
        for c in problem.theory_constraints() {
            if c.kind != ConstraintKind::Temporal {
                return Err(Error::InvalidProblem(format!(
                    "theory constraint `{}` has kind {:?}; only temporal constraints can be solved without a domain",
                    c.name, c.kind
                )));
            }
            let payload = c.payload().cloned().unwrap_or_default();
            let spec: TemporalSpec = serde_json::from_value(payload)
                .map_err(|e| Error::InvalidProblem(format!("payload of `{}`: {e}", c.name)))?;
            for e in [spec.from, spec.to] {
                if e as usize > problem.n() {
                    return Err(Error::InvalidProblem(format!("payload of `{}` names event {e} beyond n = {}", c.name, problem.n())));
                }
            }
            constraints.push(TemporalConstraint::new(c.id, spec, c.weight)?);
        }
        Ok(StnTheory::new(problem.n(), constraints, horizon))
    }

    pub fn constraints(&self) -> &[TemporalConstraint] {
        &self.constraints
    }

    pub fn outcome(&mut self, order: &TotalOrder) -> &TemporalOutcome {
        let fresh = !matches!(&self.last, Some((o, _)) if o == order);
        if fresh {
            let out = optimal_temporal_relaxation(self.n, &self.constraints, &order_precedences(order), self.horizon);
            self.last = Some((order.clone(), out));
        }
        &self.last.as_ref().expect("just computed").1
    }
}

impl Theory for StnTheory {
    fn evaluate(&mut self, order: &TotalOrder) -> Relaxation {
        let outcome = self.outcome(order).clone();
        let mut rel = Relaxation::default();
        for i in outcome.relaxed {
            let c = &self.constraints[i];
            rel.insert(c.id, c.weight.cost());
        }
        rel
    }

    fn extract(&mut self, order: &TotalOrder) -> Vec<BoundingConstraint> {
        let cycles = self.outcome(order).cycles.clone();
        extract_temporal_bounds(self.n, &self.constraints, self.horizon, &cycles)
    }
}
