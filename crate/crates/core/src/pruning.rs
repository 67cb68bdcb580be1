//! Jumps that skip subtrees which provably cannot beat the incumbent.

use crate::bounding::{BoundId, BoundingConstraint, BoundingRegistry};
use crate::cost::ExtendedCost;
use crate::model::TotalOrder;
use crate::tree::OrderMove;

/// Lowest-ranked move that can break one of the bound's partial orders.
/// Only events at or below the level may move, so a partial order whose
/// earlier event lies beyond the level can only be broken by backtracking.
pub fn first_resolving(order: &TotalOrder, theta: &BoundingConstraint) -> OrderMove {
    let n = order.len();
    let level = order.level();
    theta
        .partial_orders()
        .iter()
        .filter(|po| po.before as usize <= level)
        .map(|po| OrderMove::new(order.position(po.before), order.position(po.after)))
        .chain(std::iter::once(OrderMove::backtrack(n)))
        .min_by_key(|m| m.rank(n))
        .expect("the backtrack move is always a candidate")
}

/// Outcome of the reduction rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reducing {
    /// The manifested bounds alone do not rule out beating the incumbent.
    Free,
    /// Orders ranked below this move cannot beat the incumbent.
    Jump(OrderMove),
}

impl Reducing {
    pub fn as_move(&self) -> Option<OrderMove> {
        match self {
            Reducing::Free => None,
            Reducing::Jump(m) => Some(*m),
        }
    }
}

/// Earliest move after which the still-unresolved costs fall below the
/// incumbent. Bounds resolved by the same move are resolved together.
pub fn first_reducing<'a, I>(order: &TotalOrder, bounds: I, incumbent: ExtendedCost) -> Reducing
where
    I: IntoIterator<Item = &'a BoundingConstraint>,
{
    let n = order.len();
    let mut moves: Vec<(OrderMove, ExtendedCost)> =
        bounds.into_iter().map(|t| (first_resolving(order, t), t.cost)).collect();
    let remaining: ExtendedCost = moves.iter().map(|&(_, c)| c).sum();
    if remaining < incumbent {
        return Reducing::Free;
    }
    moves.sort_by_key(|&(m, _)| m.rank(n));
    let mut idx = 0;
    while idx < moves.len() {
        let m = moves[idx].0;
        while idx < moves.len() && moves[idx].0 == m {
            idx += 1;
        }
        let remaining: ExtendedCost = moves[idx..].iter().map(|&(_, c)| c).sum();
        if remaining < incumbent {
            return Reducing::Jump(m);
        }
    }
    Reducing::Jump(OrderMove::backtrack(n))
}

/// Registry-id convenience wrapper around [`first_reducing`].
pub fn first_reducing_ids(
    order: &TotalOrder,
    registry: &BoundingRegistry,
    ids: &[BoundId],
    incumbent: ExtendedCost,
) -> Reducing {
    first_reducing(order, ids.iter().map(|&id| &registry.get(id).bound), incumbent)
}
