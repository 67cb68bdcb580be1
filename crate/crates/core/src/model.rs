//! Events, orders, constraints and the ordering problem.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::cost::ExtendedCost;
use crate::error::{Error, Result};

/// Events are the natural numbers `1..=n`. `0` is reserved for the temporal
/// origin.
pub type Event = u32;

/// `before ≺ after`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialOrder {
    pub before: Event,
    pub after: Event,
}

impl PartialOrder {
    pub fn new(before: Event, after: Event) -> Self {
        debug_assert_ne!(before, after, "an event cannot precede itself");
        PartialOrder { before, after }
    }

    /// `¬(a ≺ b) = (b ≺ a)`.
    pub fn reverse(self) -> Self {
        PartialOrder { before: self.after, after: self.before }
    }
}

impl fmt::Display for PartialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}≺{})", self.before, self.after)
    }
}

impl Serialize for PartialOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.before, self.after].serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [before, after] = <[Event; 2]>::deserialize(d)?;
        if before == after {
            return Err(D::Error::custom(format!("partial order [{before},{after}] relates an event to itself")));
        }
        Ok(PartialOrder { before, after })
    }
}

/// A permutation of `1..=n` with cached inverse positions and level.
///
/// Positions are 1-based everywhere in the public API.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TotalOrder {
    seq: Vec<Event>,
    // pos[e] = 1-based position of event e; pos[0] unused
    pos: Vec<u32>,
    level: usize,
}

impl TotalOrder {
    pub fn new(seq: Vec<Event>) -> Result<Self> {
        let n = seq.len();
        if n == 0 {
            return Err(Error::InvalidOrder("empty sequence".into()));
        }
        let mut pos = vec![0u32; n + 1];
        for (idx, &e) in seq.iter().enumerate() {
            if e == 0 || e as usize > n {
                return Err(Error::InvalidOrder(format!("event {e} outside 1..={n}")));
            }
            if pos[e as usize] != 0 {
                return Err(Error::InvalidOrder(format!("event {e} occurs twice")));
            }
            pos[e as usize] = idx as u32 + 1;
        }
        let level = compute_level(&seq);
        Ok(TotalOrder { seq, pos, level })
    }

    /// The identity order `(1, 2, .., n)`.
    pub fn root(n: usize) -> Self {
        assert!(n > 0, "an order needs at least one event");
        let seq: Vec<Event> = (1..=n as Event).collect();
        let pos: Vec<u32> = (0..=n as u32).collect();
        TotalOrder { seq, pos, level: n }
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.seq
    }

    /// 1-based position of `e`.
    #[inline]
    pub fn position(&self, e: Event) -> usize {
        self.pos[e as usize] as usize
    }

    /// Event at 1-based position `p`.
    #[inline]
    pub fn at(&self, p: usize) -> Event {
        self.seq[p - 1]
    }

    #[inline]
    pub fn implies(&self, po: PartialOrder) -> bool {
        self.pos[po.before as usize] < self.pos[po.after as usize]
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_root(&self) -> bool {
        self.level == self.seq.len() && self.seq.iter().enumerate().all(|(i, &e)| e as usize == i + 1)
    }
}

fn compute_level(seq: &[Event]) -> usize {
    seq.iter()
        .enumerate()
        .find(|(i, &e)| e as usize != i + 1)
        .map(|(i, _)| i + 1)
        .unwrap_or(seq.len())
}

/// True iff `po.before` occurs earlier than `po.after` in `order`.
pub fn implies(order: &TotalOrder, po: PartialOrder) -> bool {
    order.implies(po)
}

impl fmt::Display for TotalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.seq.len() <= 9 {
            for e in &self.seq {
                write!(f, "{e}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.seq.iter().map(|e| e.to_string()).collect();
            f.write_str(&parts.join("-"))
        }
    }
}

impl fmt::Debug for TotalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TotalOrder({self})")
    }
}

impl FromStr for TotalOrder {
    type Err = Error;

    /// Accepts `23415` for orders of at most nine events, or any of
    /// `2,3,4,1,5` / `2-3-4-1-5` / `2 3 4 1 5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let seq: std::result::Result<Vec<Event>, _> = if s.contains([',', '-', ' ']) {
            s.split([',', '-', ' ']).filter(|p| !p.is_empty()).map(str::parse).collect()
        } else {
            s.chars().map(|c| c.to_string().parse()).collect()
        };
        let seq = seq.map_err(|e| Error::InvalidOrder(format!("{s:?}: {e}")))?;
        TotalOrder::new(seq)
    }
}

impl Serialize for TotalOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.seq.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TotalOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let seq = Vec::<Event>::deserialize(d)?;
        TotalOrder::new(seq).map_err(D::Error::custom)
    }
}

/// Relaxation weight of a constraint: hard (`∞`) or a positive soft cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    Hard,
    Soft(f64),
}

impl Weight {
    pub fn soft(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Weight::Soft(c))
        } else {
            Err(Error::InvalidProblem(format!("constraint weight must be positive, got {c}")))
        }
    }

    pub fn cost(self) -> ExtendedCost {
        match self {
            Weight::Hard => ExtendedCost::INFINITY,
            Weight::Soft(c) => ExtendedCost::finite(c),
        }
    }

    pub fn is_hard(self) -> bool {
        matches!(self, Weight::Hard)
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Weight::Hard => s.serialize_str("inf"),
            Weight::Soft(c) => s.serialize_f64(*c),
        }
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) if s == "inf" => Ok(Weight::Hard),
            Value::Number(n) => {
                let c = n.as_f64().ok_or_else(|| D::Error::custom("weight out of range"))?;
                Weight::soft(c).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!("weight must be a positive number or \"inf\", got {other}"))),
        }
    }
}

/// Dense index of a constraint within its problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConstraintId(pub u32);

impl ConstraintId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Ordering,
    State,
    Temporal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintBody {
    /// Disjunction of partial orders.
    Ordering(Vec<PartialOrder>),
    /// Body interpreted by the sub-solver owning this kind.
    Theory(Value),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub id: ConstraintId,
    pub name: String,
    pub kind: ConstraintKind,
    pub weight: Weight,
    pub body: ConstraintBody,
}

impl Constraint {
    pub fn disjuncts(&self) -> &[PartialOrder] {
        match &self.body {
            ConstraintBody::Ordering(d) => d,
            ConstraintBody::Theory(_) => &[],
        }
    }

    pub fn payload(&self) -> Option<&Value> {
        match &self.body {
            ConstraintBody::Theory(v) => Some(v),
            ConstraintBody::Ordering(_) => None,
        }
    }

    pub fn is_satisfied_by(&self, order: &TotalOrder) -> bool {
        self.disjuncts().iter().any(|&po| order.implies(po))
    }
}

/// Events `1..=n`, ordering constraints and theory constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderingProblem {
    n: usize,
    constraints: Vec<Constraint>,
}

impl OrderingProblem {
    pub fn new(n: usize) -> Self {
        OrderingProblem { n, constraints: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, id: ConstraintId) -> &Constraint {
        &self.constraints[id.index()]
    }

    pub fn weight(&self, id: ConstraintId) -> ExtendedCost {
        self.constraint(id).weight.cost()
    }

    pub fn is_hard(&self, id: ConstraintId) -> bool {
        self.constraint(id).weight.is_hard()
    }

    pub fn name(&self, id: ConstraintId) -> &str {
        &self.constraint(id).name
    }

    pub fn find(&self, name: &str) -> Option<ConstraintId> {
        self.constraints.iter().find(|c| c.name == name).map(|c| c.id)
    }

    pub fn ordering_constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| c.kind == ConstraintKind::Ordering)
    }

    pub fn theory_constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| c.kind != ConstraintKind::Ordering)
    }

    fn push(&mut self, name: String, kind: ConstraintKind, weight: Weight, body: ConstraintBody) -> Result<ConstraintId> {
        if self.find(&name).is_some() {
            return Err(Error::InvalidProblem(format!("duplicate constraint id {name:?}")));
        }
        let id = ConstraintId(self.constraints.len() as u32);
        self.constraints.push(Constraint { id, name, kind, weight, body });
        Ok(id)
    }

    pub fn add_ordering(&mut self, name: impl Into<String>, weight: Weight, disjuncts: Vec<PartialOrder>) -> Result<ConstraintId> {
        let name = name.into();
        if disjuncts.is_empty() {
            return Err(Error::InvalidProblem(format!("ordering constraint {name:?} has no disjuncts")));
        }
        for po in &disjuncts {
            self.check_event(po.before, &name)?;
            self.check_event(po.after, &name)?;
            if po.before == po.after {
                return Err(Error::InvalidProblem(format!("ordering constraint {name:?} relates event {} to itself", po.before)));
            }
        }
        self.push(name, ConstraintKind::Ordering, weight, ConstraintBody::Ordering(disjuncts))
    }

    pub fn add_theory(&mut self, name: impl Into<String>, kind: ConstraintKind, weight: Weight, payload: Value) -> Result<ConstraintId> {
        let name = name.into();
        if kind == ConstraintKind::Ordering {
            return Err(Error::InvalidProblem(format!("theory constraint {name:?} cannot have kind ordering")));
        }
        self.push(name, kind, weight, ConstraintBody::Theory(payload))
    }

    fn check_event(&self, e: Event, ctx: &str) -> Result<()> {
        if e == 0 || e as usize > self.n {
            Err(Error::InvalidProblem(format!("constraint {ctx:?} references event {e} outside 1..={}", self.n)))
        } else {
            Ok(())
        }
    }

    /// Optimal relaxation of the ordering constraints alone: exactly the
    /// violated ones.
    pub fn ordering_relaxation(&self, order: &TotalOrder) -> Relaxation {
        let mut rel = Relaxation::default();
        for c in self.ordering_constraints() {
            if !c.is_satisfied_by(order) {
                rel.insert(c.id, c.weight.cost());
            }
        }
        rel
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProblemDoc = serde_json::from_str(text)?;
        doc.into_problem()
    }

    pub fn to_json(&self) -> Value {
        let doc = ProblemDoc {
            n: self.n,
            ordering_constraints: self
                .ordering_constraints()
                .map(|c| OrderingDoc { id: c.name.clone(), weight: c.weight, disjuncts: c.disjuncts().to_vec() })
                .collect(),
            theory_constraints: self
                .theory_constraints()
                .map(|c| TheoryDoc {
                    id: c.name.clone(),
                    weight: c.weight,
                    kind: c.kind,
                    payload: c.payload().cloned().unwrap_or(Value::Null),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("problem document serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    n: usize,
    #[serde(default)]
    ordering_constraints: Vec<OrderingDoc>,
    #[serde(default)]
    theory_constraints: Vec<TheoryDoc>,
}

#[derive(Serialize, Deserialize)]
struct OrderingDoc {
    id: String,
    weight: Weight,
    disjuncts: Vec<PartialOrder>,
}

#[derive(Serialize, Deserialize)]
struct TheoryDoc {
    id: String,
    weight: Weight,
    kind: ConstraintKind,
    #[serde(default)]
    payload: Value,
}

impl ProblemDoc {
    fn into_problem(self) -> Result<OrderingProblem> {
        if self.n == 0 {
            return Err(Error::InvalidProblem("field `n` must be at least 1".into()));
        }
        let mut p = OrderingProblem::new(self.n);
        for o in self.ordering_constraints {
            p.add_ordering(o.id, o.weight, o.disjuncts)?;
        }
        for t in self.theory_constraints {
            p.add_theory(t.id, t.kind, t.weight, t.payload)?;
        }
        Ok(p)
    }
}

/// A set of relaxed constraints and the sum of their weights.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Relaxation {
    pub relaxed: BTreeSet<ConstraintId>,
    pub cost: ExtendedCost,
}

impl Relaxation {
    pub fn from_ids(problem: &OrderingProblem, ids: impl IntoIterator<Item = ConstraintId>) -> Self {
        let mut rel = Relaxation::default();
        for id in ids {
            rel.insert(id, problem.weight(id));
        }
        rel
    }

    pub fn insert(&mut self, id: ConstraintId, weight: ExtendedCost) {
        if self.relaxed.insert(id) {
            self.cost += weight;
        }
    }

    /// Union with a relaxation over a disjoint set of constraints.
    pub fn merge(&mut self, other: Relaxation) {
        debug_assert!(self.relaxed.is_disjoint(&other.relaxed));
        self.relaxed.extend(other.relaxed);
        self.cost += other.cost;
    }

    pub fn names(&self, problem: &OrderingProblem) -> Vec<String> {
        self.relaxed.iter().map(|&id| problem.name(id).to_string()).collect()
    }
}
