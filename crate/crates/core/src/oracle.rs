//! Exhaustive reference solver: evaluates `g` on every permutation.

use crate::cost::ExtendedCost;
use crate::error::{Error, Result};
use crate::model::{Event, OrderingProblem, TotalOrder};
use crate::theory::{evaluate_g, Theory};

pub const MAX_ORACLE_EVENTS: usize = 8;

/// Lexicographically first order of minimum cost.
pub fn oracle_solve(problem: &OrderingProblem, theory: &mut dyn Theory) -> Result<(TotalOrder, ExtendedCost)> {
    let n = problem.n();
    if n > MAX_ORACLE_EVENTS {
        return Err(Error::Capacity { n, max: MAX_ORACLE_EVENTS });
    }
    let mut best: Option<(TotalOrder, ExtendedCost)> = None;
    for seq in permutations(n) {
        let order = TotalOrder::new(seq)?;
        let cost = evaluate_g(problem, theory, &order).cost;
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((order, cost));
        }
    }
    best.ok_or_else(|| Error::InvalidProblem("a problem needs at least one event".into()))
}

/// Every order with its cost, in lexicographic order.
pub fn oracle_costs(problem: &OrderingProblem, theory: &mut dyn Theory) -> Result<Vec<(TotalOrder, ExtendedCost)>> {
    let n = problem.n();
    if n > MAX_ORACLE_EVENTS {
        return Err(Error::Capacity { n, max: MAX_ORACLE_EVENTS });
    }
    permutations(n)
        .map(|seq| {
            let order = TotalOrder::new(seq)?;
            let cost = evaluate_g(problem, theory, &order).cost;
            Ok((order, cost))
        })
        .collect()
}

/// Permutations of `1..=n` in lexicographic order.
fn permutations(n: usize) -> impl Iterator<Item = Vec<Event>> {
    let mut next: Option<Vec<Event>> = (n > 0).then(|| (1..=n as Event).collect());
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut a = cur.clone();
        if let Some(i) = (0..a.len().saturating_sub(1)).rev().find(|&i| a[i] < a[i + 1]) {
            let j = (i + 1..a.len()).rev().find(|&j| a[j] > a[i]).expect("a larger element exists");
            a.swap(i, j);
            a[i + 1..].reverse();
            next = Some(a);
        }
        Some(cur)
    })
}
