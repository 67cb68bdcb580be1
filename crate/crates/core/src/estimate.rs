//! Optimistic cost estimation from manifested bounding constraints.
//!
//! Bounding constraints whose constraint sets overlap only on hard
//! constraints can have their costs summed without double counting a soft
//! relaxation. The estimate is the heaviest such pairwise-disjoint family,
//! found as a maximum-weight clique of the disjointness graph.

use serde::{Deserialize, Serialize};

use crate::bounding::{sorted_disjoint, BoundId, BoundingConstraint, BoundingRegistry};
use crate::cost::ExtendedCost;
use crate::model::{OrderingProblem, TotalOrder};

const EPS: f64 = 1e-9;

/// Two bounds are disjoint when every constraint they share is hard.
pub fn disjoint(a: &BoundingConstraint, b: &BoundingConstraint, problem: &OrderingProblem) -> bool {
    let soft = |t: &BoundingConstraint| -> Vec<_> {
        t.constraint_set().iter().copied().filter(|&c| !problem.is_hard(c)).collect()
    };
    sorted_disjoint(&soft(a), &soft(b))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CliqueMode {
    #[default]
    Exact,
    Greedy,
}

/// Vertex-weighted undirected graph; vertices are `0..len`.
#[derive(Clone, Debug)]
pub struct DisjointnessGraph {
    weights: Vec<ExtendedCost>,
    adj: Vec<Vec<u64>>,
}

impl DisjointnessGraph {
    pub fn new(weights: Vec<ExtendedCost>) -> Self {
        let words = weights.len().div_ceil(64);
        let adj = vec![vec![0u64; words]; weights.len()];
        DisjointnessGraph { weights, adj }
    }

    /// Vertices follow the order of `ids`.
    pub fn from_registry(registry: &BoundingRegistry, ids: &[BoundId]) -> Self {
        let mut g = DisjointnessGraph::new(ids.iter().map(|&id| registry.get(id).bound.cost).collect());
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                if registry.disjoint(ids[a], ids[b]) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, v: usize) -> ExtendedCost {
        self.weights[v]
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b);
        self.adj[a][b / 64] |= 1 << (b % 64);
        self.adj[b][a / 64] |= 1 << (a % 64);
    }

    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b / 64] & (1 << (b % 64)) != 0
    }

    fn weight_of(&self, vs: &[usize]) -> ExtendedCost {
        vs.iter().map(|&v| self.weights[v]).sum()
    }
}

fn exceeds(a: ExtendedCost, b: ExtendedCost) -> bool {
    a.k > b.k || (a.k == b.k && a.c > b.c + EPS * b.c.abs().max(1.0))
}

fn reaches(a: ExtendedCost, target: ExtendedCost) -> bool {
    !exceeds(target, a)
}

/// Exact maximum-weight clique. Among cliques of maximum weight the
/// lexicographically smallest sorted vertex list is returned.
pub fn max_weight_clique(g: &DisjointnessGraph) -> (Vec<usize>, ExtendedCost) {
    if g.is_empty() {
        return (Vec::new(), ExtendedCost::ZERO);
    }
    let best = MaxSearch::run(g);
    let clique = lex_smallest_reaching(g, best);
    let w = g.weight_of(&clique);
    (clique, w)
}

/// Heaviest-first greedy clique. Sound as an estimate but not maximal in
/// weight.
pub fn greedy_clique(g: &DisjointnessGraph) -> (Vec<usize>, ExtendedCost) {
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&a, &b| g.weights[b].cmp(&g.weights[a]).then(a.cmp(&b)));
    let mut chosen: Vec<usize> = Vec::new();
    for v in order {
        if chosen.iter().all(|&u| g.adjacent(u, v)) {
            chosen.push(v);
        }
    }
    chosen.sort_unstable();
    let w = g.weight_of(&chosen);
    (chosen, w)
}

/// Greedy colouring bound: candidates are assumed sorted by decreasing
/// weight, so the first vertex of each colour class is its heaviest.
/// Returns candidates regrouped by class and, for each position, the sum of
/// class maxima up to and including that position's class.
fn colour_bounds(g: &DisjointnessGraph, cands: &[usize]) -> (Vec<usize>, Vec<ExtendedCost>) {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in cands {
        match classes.iter_mut().find(|cls| cls.iter().all(|&u| !g.adjacent(u, v))) {
            Some(cls) => cls.push(v),
            None => classes.push(vec![v]),
        }
    }
    let mut ordered = Vec::with_capacity(cands.len());
    let mut bounds = Vec::with_capacity(cands.len());
    let mut acc = ExtendedCost::ZERO;
    for cls in classes {
        acc += g.weights[cls[0]];
        for v in cls {
            ordered.push(v);
            bounds.push(acc);
        }
    }
    (ordered, bounds)
}

struct MaxSearch<'a> {
    g: &'a DisjointnessGraph,
    best: ExtendedCost,
}

impl<'a> MaxSearch<'a> {
    fn run(g: &'a DisjointnessGraph) -> ExtendedCost {
        let mut cands: Vec<usize> = (0..g.len()).collect();
        cands.sort_by(|&a, &b| g.weights[b].cmp(&g.weights[a]).then(a.cmp(&b)));
        let mut s = MaxSearch { g, best: ExtendedCost::ZERO };
        s.expand(ExtendedCost::ZERO, &cands);
        s.best
    }

    fn expand(&mut self, cur: ExtendedCost, cands: &[usize]) {
        if exceeds(cur, self.best) {
            self.best = cur;
        }
        if cands.is_empty() {
            return;
        }
        let (ordered, bounds) = colour_bounds(self.g, cands);
        // branch from the last colour class backwards; earlier vertices only
        // see what precedes them, so the prefix bound applies
        for idx in (0..ordered.len()).rev() {
            if !exceeds(cur + bounds[idx], self.best) {
                return;
            }
            let v = ordered[idx];
            let mut next: Vec<usize> = ordered[..idx].iter().copied().filter(|&u| self.g.adjacent(u, v)).collect();
            next.sort_by(|&a, &b| self.g.weights[b].cmp(&self.g.weights[a]).then(a.cmp(&b)));
            self.expand(cur + self.g.weights[v], &next);
        }
    }
}

/// First clique, in lexicographic order of sorted vertex lists, whose weight
/// reaches `target`.
fn lex_smallest_reaching(g: &DisjointnessGraph, target: ExtendedCost) -> Vec<usize> {
    fn dfs(g: &DisjointnessGraph, cur: &mut Vec<usize>, w: ExtendedCost, cands: &[usize], target: ExtendedCost) -> bool {
        if reaches(w, target) {
            return true;
        }
        let rest: ExtendedCost = cands.iter().map(|&v| g.weights[v]).sum();
        if !reaches(w + rest, target) {
            return false;
        }
        for (idx, &v) in cands.iter().enumerate() {
            let next: Vec<usize> = cands[idx + 1..].iter().copied().filter(|&u| g.adjacent(u, v)).collect();
            cur.push(v);
            if dfs(g, cur, w + g.weights[v], &next, target) {
                return true;
            }
            cur.pop();
            let rest: ExtendedCost = cands[idx + 1..].iter().map(|&u| g.weights[u]).sum();
            if !reaches(w + rest, target) {
                return false;
            }
        }
        false
    }
    let all: Vec<usize> = (0..g.len()).collect();
    let mut cur = Vec::new();
    let found = dfs(g, &mut cur, ExtendedCost::ZERO, &all, target);
    debug_assert!(found, "the maximum weight is attained by some clique");
    cur
}

/// Estimated cost and the disjoint family that witnesses it.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub cost: ExtendedCost,
    pub witness: Vec<BoundId>,
}

pub fn estimate_cost(registry: &BoundingRegistry, order: &TotalOrder, mode: CliqueMode) -> Estimate {
    estimate_manifested(registry, &registry.manifested_subset(order), mode)
}

/// Estimate over an already computed manifested subset.
pub fn estimate_manifested(registry: &BoundingRegistry, manifested: &[BoundId], mode: CliqueMode) -> Estimate {
    if manifested.is_empty() {
        return Estimate { cost: ExtendedCost::ZERO, witness: Vec::new() };
    }
    let g = DisjointnessGraph::from_registry(registry, manifested);
    let (clique, _) = match mode {
        CliqueMode::Exact => max_weight_clique(&g),
        CliqueMode::Greedy => greedy_clique(&g),
    };
    let witness: Vec<BoundId> = clique.iter().map(|&v| manifested[v]).collect();
    // summed in id order so equal families give bitwise-equal estimates
    let cost = witness.iter().map(|&id| registry.get(id).bound.cost).sum();
    Estimate { cost, witness }
}
