//! Flow routing on a network: candidate paths, feasibility of concurrent
//! flow sets under link bandwidth, optimal flow dropping and the partial
//! orders that make a set of flows concurrent.
//!
//! Flow sets are bitmasks over flow indices, so at most 64 flows.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cost::ExtendedCost;
use crate::error::{Error, Result};
use crate::model::{Event, PartialOrder, TotalOrder};

pub type FlowSet = u64;

pub const MAX_FLOWS: usize = 64;

const EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub a: u32,
    pub b: u32,
    /// Percent.
    pub loss: f64,
    /// Seconds.
    pub delay: f64,
    /// kbps.
    pub bandwidth: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    pub nodes: Vec<u32>,
    pub links: Vec<Link>,
}

impl Topology {
    pub fn validate(&self) -> Result<()> {
        let nodes: HashSet<u32> = self.nodes.iter().copied().collect();
        if nodes.len() != self.nodes.len() {
            return Err(Error::InvalidInstance("topology.nodes contains duplicates".into()));
        }
        for (i, l) in self.links.iter().enumerate() {
            if !nodes.contains(&l.a) || !nodes.contains(&l.b) {
                return Err(Error::InvalidInstance(format!("topology.links[{i}] references an unknown node")));
            }
            if l.a == l.b {
                return Err(Error::InvalidInstance(format!("topology.links[{i}] is a self loop")));
            }
            for (name, v) in [("loss", l.loss), ("delay", l.delay), ("bandwidth", l.bandwidth)] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidInstance(format!("topology.links[{i}].{name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }
}

/// Requirements of one flow on its route.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowDemand {
    pub source: u32,
    pub sink: u32,
    pub max_loss: f64,
    pub max_delay: f64,
    pub min_throughput: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<u32>,
    pub links: Vec<usize>,
}

/// Every simple path whose summed delay and loss stay within the demand,
/// fewest hops first, then by node sequence.
pub fn candidate_paths(topo: &Topology, demand: &FlowDemand) -> Vec<Path> {
    let mut out = Vec::new();
    if demand.source == demand.sink {
        return out;
    }
    let mut nodes = vec![demand.source];
    let mut links = Vec::new();
    fn dfs(topo: &Topology, d: &FlowDemand, nodes: &mut Vec<u32>, links: &mut Vec<usize>, loss: f64, delay: f64, out: &mut Vec<Path>) {
        let here = *nodes.last().expect("path starts at the source");
        for (idx, l) in topo.links.iter().enumerate() {
            let next = if l.a == here {
                l.b
            } else if l.b == here {
                l.a
            } else {
                continue;
            };
            if nodes.contains(&next) {
                continue;
            }
            let (loss, delay) = (loss + l.loss, delay + l.delay);
            if loss > d.max_loss + EPS || delay > d.max_delay + EPS {
                continue;
            }
            nodes.push(next);
            links.push(idx);
            if next == d.sink {
                out.push(Path { nodes: nodes.clone(), links: links.clone() });
            } else {
                dfs(topo, d, nodes, links, loss, delay, out);
            }
            nodes.pop();
            links.pop();
        }
    }
    dfs(topo, demand, &mut nodes, &mut links, 0.0, 0.0, &mut out);
    out.sort_by(|a, b| a.links.len().cmp(&b.links.len()).then_with(|| a.nodes.cmp(&b.nodes)).then_with(|| a.links.cmp(&b.links)));
    out
}

pub fn members(set: FlowSet) -> impl Iterator<Item = usize> {
    (0..MAX_FLOWS).filter(move |&i| set >> i & 1 == 1)
}

#[derive(PartialEq)]
struct Node {
    cost: ExtendedCost,
    size: u32,
    ids: Vec<usize>,
    set: FlowSet,
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.cmp(&self.cost).then_with(|| other.size.cmp(&self.size)).then_with(|| other.ids.cmp(&self.ids))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Flows on a topology with memoized feasibility and drop searches.
#[derive(Clone, Debug)]
pub struct Network {
    topology: Topology,
    demands: Vec<FlowDemand>,
    drop_costs: Vec<ExtendedCost>,
    paths: Vec<Vec<Path>>,
    feasible_memo: HashMap<FlowSet, bool>,
    drop_memo: HashMap<FlowSet, (FlowSet, ExtendedCost)>,
}

impl Network {
    pub fn new(topology: Topology, demands: Vec<FlowDemand>, drop_costs: Vec<ExtendedCost>) -> Result<Self> {
        topology.validate()?;
        if demands.len() > MAX_FLOWS {
            return Err(Error::Capacity { n: demands.len(), max: MAX_FLOWS });
        }
        assert_eq!(demands.len(), drop_costs.len());
        let paths = demands.iter().map(|d| candidate_paths(&topology, d)).collect();
        Ok(Network { topology, demands, drop_costs, paths, feasible_memo: HashMap::new(), drop_memo: HashMap::new() })
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn paths(&self, flow: usize) -> &[Path] {
        &self.paths[flow]
    }

    pub fn drop_cost(&self, flow: usize) -> ExtendedCost {
        self.drop_costs[flow]
    }

    pub fn set_cost(&self, set: FlowSet) -> ExtendedCost {
        members(set).map(|f| self.drop_costs[f]).sum()
    }

    /// Whether one candidate path per flow fits every link's bandwidth.
    pub fn feasible(&mut self, set: FlowSet) -> bool {
        if let Some(&f) = self.feasible_memo.get(&set) {
            return f;
        }
        let f = self.assign(set);
        self.feasible_memo.insert(set, f);
        f
    }

    fn assign(&self, set: FlowSet) -> bool {
        let mut flows: Vec<usize> = members(set).collect();
        flows.sort_by_key(|&f| (self.paths[f].len(), f));
        if flows.iter().any(|&f| self.paths[f].is_empty()) {
            return false;
        }
        let mut load = vec![0.0f64; self.topology.links.len()];
        fn go(net: &Network, flows: &[usize], load: &mut [f64]) -> bool {
            let Some((&f, rest)) = flows.split_first() else { return true };
            let need = net.demands[f].min_throughput;
            for p in &net.paths[f] {
                if p.links.iter().all(|&l| load[l] + need <= net.topology.links[l].bandwidth + EPS) {
                    for &l in &p.links {
                        load[l] += need;
                    }
                    let ok = go(net, rest, load);
                    for &l in &p.links {
                        load[l] -= need;
                    }
                    if ok {
                        return true;
                    }
                }
            }
            false
        }
        go(self, &flows, &mut load)
    }

    /// Shrinks an infeasible set to one where every member is needed for the
    /// infeasibility.
    fn infeasible_core(&mut self, set: FlowSet) -> FlowSet {
        let mut core = set;
        for f in members(set) {
            let without = core & !(1 << f);
            if !self.feasible(without) {
                core = without;
            }
        }
        core
    }

    /// Cheapest flows to drop so every given set becomes feasible. Ties go to
    /// fewer drops, then to lexicographically smaller flow indices.
    pub fn optimal_drop_all(&mut self, sets: &[FlowSet]) -> (FlowSet, ExtendedCost) {
        let mut heap = BinaryHeap::new();
        let mut seen: HashSet<FlowSet> = HashSet::new();
        heap.push(Node { cost: ExtendedCost::ZERO, size: 0, ids: Vec::new(), set: 0 });
        seen.insert(0);
        while let Some(node) = heap.pop() {
            let violated = sets.iter().map(|&s| s & !node.set).find(|&rest| !self.feasible(rest));
            let Some(rest) = violated else {
                return (node.set, node.cost);
            };
            let core = self.infeasible_core(rest);
            for f in members(core) {
                let next = node.set | 1 << f;
                if seen.insert(next) {
                    let mut ids: Vec<usize> = members(next).collect();
                    ids.sort_unstable();
                    heap.push(Node { cost: node.cost + self.drop_costs[f], size: node.size + 1, ids, set: next });
                }
            }
        }
        unreachable!("dropping every flow is feasible")
    }

    pub fn optimal_drop(&mut self, set: FlowSet) -> (FlowSet, ExtendedCost) {
        if let Some(&r) = self.drop_memo.get(&set) {
            return r;
        }
        let r = self.optimal_drop_all(&[set]);
        self.drop_memo.insert(set, r);
        r
    }
}

/// Flows `i` and `j` overlap when each starts before the other ends.
pub fn concurrent(order: &TotalOrder, a: (Event, Event), b: (Event, Event)) -> bool {
    let before = |x: Event, y: Event| order.position(x) < order.position(y);
    before(a.0, b.1) && before(b.0, a.1)
}

/// Maximal sets of pairwise concurrent flows, by a sweep over the order.
/// A flow whose start does not precede its end is never active.
pub fn maximal_concurrent_sets(order: &TotalOrder, intervals: &[(Event, Event)]) -> Vec<FlowSet> {
    let mut starts_at: HashMap<Event, Vec<usize>> = HashMap::new();
    let mut ends_at: HashMap<Event, Vec<usize>> = HashMap::new();
    for (f, &(s, e)) in intervals.iter().enumerate() {
        if order.position(s) < order.position(e) {
            starts_at.entry(s).or_default().push(f);
            ends_at.entry(e).or_default().push(f);
        }
    }
    let mut active: FlowSet = 0;
    let mut snapshots: Vec<FlowSet> = Vec::new();
    for &ev in order.events() {
        // half-open intervals: flows ending here are gone before new ones start
        for &f in ends_at.get(&ev).into_iter().flatten() {
            active &= !(1 << f);
        }
        if let Some(fs) = starts_at.get(&ev) {
            for &f in fs {
                active |= 1 << f;
            }
            snapshots.push(active);
        }
    }
    let mut maximal: Vec<FlowSet> = Vec::new();
    for (i, &s) in snapshots.iter().enumerate() {
        let dominated = snapshots.iter().enumerate().any(|(j, &t)| t != s && t & s == s || (t == s && j < i));
        if !dominated {
            maximal.push(s);
        }
    }
    maximal
}

/// Partial orders under which every pair of the given flows is concurrent,
/// minus each member's own start-before-end.
pub fn extract_po_s(intervals: &[(Event, Event)], set: FlowSet) -> Vec<PartialOrder> {
    let fs: Vec<usize> = members(set).collect();
    let own: HashSet<(Event, Event)> = fs.iter().map(|&f| intervals[f]).collect();
    let mut out = Vec::new();
    for &i in &fs {
        for &j in &fs {
            if i == j {
                continue;
            }
            let (s, e) = (intervals[i].0, intervals[j].1);
            if s != e && !own.contains(&(s, e)) {
                out.push(PartialOrder::new(s, e));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}
