//! Bounding constraints: a conjunction of partial orders together with a set
//! of constraints whose optimal relaxation costs at least `cost` in every
//! total order implying those partial orders.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::ExtendedCost;
use crate::error::{Error, Result};
use crate::model::{ConstraintId, ConstraintKind, OrderingProblem, PartialOrder, TotalOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSource {
    Ordering,
    State,
    Temporal,
}

impl From<ConstraintKind> for BoundSource {
    fn from(k: ConstraintKind) -> Self {
        match k {
            ConstraintKind::Ordering => BoundSource::Ordering,
            ConstraintKind::State => BoundSource::State,
            ConstraintKind::Temporal => BoundSource::Temporal,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundingConstraint {
    partial_orders: Vec<PartialOrder>,
    constraint_set: Vec<ConstraintId>,
    pub cost: ExtendedCost,
    pub source: BoundSource,
}

impl BoundingConstraint {
    /// Partial orders and constraints are kept sorted and deduplicated.
    /// An empty partial-order set is allowed: such a bound holds in every
    /// total order.
    pub fn new(
        mut partial_orders: Vec<PartialOrder>,
        mut constraint_set: Vec<ConstraintId>,
        cost: ExtendedCost,
        source: BoundSource,
    ) -> Result<Self> {
        partial_orders.sort_unstable();
        partial_orders.dedup();
        constraint_set.sort_unstable();
        constraint_set.dedup();
        if let Some(po) = partial_orders.iter().find(|po| partial_orders.binary_search(&po.reverse()).is_ok()) {
            return Err(Error::Contradictory(po.to_string(), "bounding constraint"));
        }
        Ok(BoundingConstraint { partial_orders, constraint_set, cost, source })
    }

    pub fn partial_orders(&self) -> &[PartialOrder] {
        &self.partial_orders
    }

    pub fn constraint_set(&self) -> &[ConstraintId] {
        &self.constraint_set
    }

    pub fn is_global(&self) -> bool {
        self.partial_orders.is_empty()
    }
}

impl fmt::Display for BoundingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<String> = self.partial_orders.iter().map(|p| p.to_string()).collect();
        let cs: Vec<String> = self.constraint_set.iter().map(|c| format!("#{}", c.0)).collect();
        write!(f, "{} ∧ {{{}}} : {}", pos.join("∧"), cs.join(","), self.cost)
    }
}

/// True iff `order` implies every partial order of `theta`.
pub fn manifests(order: &TotalOrder, theta: &BoundingConstraint) -> bool {
    theta.partial_orders.iter().all(|&po| order.implies(po))
}

/// One bounding constraint per ordering constraint: an order violates
/// `q₁ ∨ q₂ ∨ …` exactly when it implies every reversed disjunct.
pub fn init_bc(problem: &OrderingProblem) -> Result<Vec<BoundingConstraint>> {
    problem
        .ordering_constraints()
        .map(|c| {
            let negated: Vec<PartialOrder> = c.disjuncts().iter().map(|po| po.reverse()).collect();
            BoundingConstraint::new(negated, vec![c.id], c.weight.cost(), BoundSource::Ordering).map_err(|_| {
                Error::InvalidProblem(format!("ordering constraint {:?} is a tautology and can never be violated", c.name))
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundId(pub u32);

#[derive(Clone, Debug)]
pub struct BoundEntry {
    pub id: BoundId,
    pub bound: BoundingConstraint,
    // soft members of the constraint set, sorted; disjointness only looks at these
    soft: Vec<ConstraintId>,
}

impl BoundEntry {
    pub fn soft_constraints(&self) -> &[ConstraintId] {
        &self.soft
    }
}

type DedupKey = (Vec<PartialOrder>, Vec<ConstraintId>);

/// Every bounding constraint learned during one solve, deduplicated on
/// (partial orders, constraint set). Grows monotonically.
#[derive(Clone, Debug)]
pub struct BoundingRegistry {
    entries: Vec<BoundEntry>,
    index: HashMap<DedupKey, BoundId>,
    hard: Vec<bool>,
}

impl BoundingRegistry {
    pub fn new(problem: &OrderingProblem) -> Self {
        BoundingRegistry {
            entries: Vec::new(),
            index: HashMap::new(),
            hard: problem.constraints().iter().map(|c| c.weight.is_hard()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: BoundId) -> &BoundEntry {
        &self.entries[id.0 as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter()
    }

    /// Insert one bound. On a (partial orders, constraint set) collision the
    /// larger cost wins. Returns the id and whether the registry changed.
    pub fn insert(&mut self, bound: BoundingConstraint) -> (BoundId, bool) {
        let key = (bound.partial_orders.clone(), bound.constraint_set.clone());
        if let Some(&id) = self.index.get(&key) {
            let entry = &mut self.entries[id.0 as usize];
            if bound.cost > entry.bound.cost {
                entry.bound.cost = bound.cost;
                return (id, true);
            }
            return (id, false);
        }
        let id = BoundId(self.entries.len() as u32);
        let soft = bound.constraint_set.iter().copied().filter(|c| !self.hard[c.index()]).collect();
        self.entries.push(BoundEntry { id, bound, soft });
        self.index.insert(key, id);
        (id, true)
    }

    /// Union with deduplication; returns how many entries were added or
    /// tightened.
    pub fn ingest(&mut self, extracted: impl IntoIterator<Item = BoundingConstraint>) -> usize {
        extracted.into_iter().map(|b| self.insert(b).1 as usize).sum()
    }

    pub fn manifested_subset(&self, order: &TotalOrder) -> Vec<BoundId> {
        self.entries.iter().filter(|e| manifests(order, &e.bound)).map(|e| e.id).collect()
    }

    /// Their constraint sets share no soft constraint.
    pub fn disjoint(&self, a: BoundId, b: BoundId) -> bool {
        sorted_disjoint(&self.get(a).soft, &self.get(b).soft)
    }
}

pub(crate) fn sorted_disjoint<T: Ord>(a: &[T], b: &[T]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}
