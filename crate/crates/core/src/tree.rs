//! The total order tree: levels, order moves, parents and the systematic
//! depth-first move rule.
//!
//! A child of an order with level `l` is obtained by right-shifting an event
//! `i < l`; the level of an order is the first position that differs from the
//! identity. Positions are 1-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TotalOrder;

/// `(i → j)`: delete the event at position `i` and reinsert it right after
/// the event at position `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderMove {
    pub i: usize,
    pub j: usize,
}

impl OrderMove {
    pub fn new(i: usize, j: usize) -> Self {
        OrderMove { i, j }
    }

    /// `(n → n+1)`: exhausted, go back to the parent.
    pub fn backtrack(n: usize) -> Self {
        OrderMove { i: n, j: n + 1 }
    }

    pub fn is_backtrack(&self, n: usize) -> bool {
        self.i >= n
    }

    /// Exploration key `n·i + j`; lower is explored earlier.
    pub fn rank(&self, n: usize) -> usize {
        n * self.i + self.j
    }
}

impl fmt::Display for OrderMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}→{})", self.i, self.j)
    }
}

pub fn level(order: &TotalOrder) -> usize {
    order.level()
}

/// Position of the level event within the order.
pub fn plv(order: &TotalOrder) -> usize {
    order.position(order.level() as u32)
}

pub fn apply_move(order: &TotalOrder, m: OrderMove) -> Result<TotalOrder> {
    let n = order.len();
    if m.is_backtrack(n) {
        return Err(Error::BacktrackMove(m.to_string()));
    }
    if m.i == 0 || m.i >= m.j || m.j > n {
        return Err(Error::InvalidOrder(format!("move {m} is not a right shift within 1..={n}")));
    }
    let mut seq = order.events().to_vec();
    let e = seq.remove(m.i - 1);
    seq.insert(m.j - 1, e);
    TotalOrder::new(seq)
}

/// The tree parent: the level event goes back to its home position. `None`
/// for the root.
pub fn parent(order: &TotalOrder) -> Option<TotalOrder> {
    if order.is_root() {
        return None;
    }
    let l = order.level();
    let mut seq = order.events().to_vec();
    let e = seq.remove(plv(order) - 1);
    debug_assert_eq!(e as usize, l);
    seq.insert(l - 1, e);
    Some(TotalOrder::new(seq).expect("parent of a permutation is a permutation"))
}

/// Current order plus the level of its latest visited child (`0` when none
/// has been visited yet).
#[derive(Clone, Debug)]
pub struct SearchCursor {
    pub current: TotalOrder,
    pub l_c: usize,
}

impl SearchCursor {
    pub fn root(n: usize) -> Self {
        SearchCursor { current: TotalOrder::root(n), l_c: 0 }
    }

    pub fn n(&self) -> usize {
        self.current.len()
    }

    /// The standard next move: the next child group while some remain,
    /// otherwise the next same-level sibling; `(n → n+1)` once both are
    /// exhausted.
    pub fn next_move(&self) -> OrderMove {
        let l = self.current.level();
        if self.l_c + 1 < l {
            OrderMove::new(self.l_c + 1, self.l_c + 2)
        } else {
            let p = plv(&self.current);
            OrderMove::new(p, p + 1)
        }
    }

    /// Apply a feasible move and start fresh at the new order.
    pub fn advance(&mut self, m: OrderMove) -> Result<()> {
        self.current = apply_move(&self.current, m)?;
        self.l_c = 0;
        Ok(())
    }

    /// Return to the parent, remembering the level of the order just left.
    /// Returns `false` at the root: the whole tree is exhausted.
    pub fn backtrack(&mut self) -> bool {
        match parent(&self.current) {
            Some(p) => {
                self.l_c = self.current.level();
                self.current = p;
                true
            }
            None => false,
        }
    }
}

/// Depth-first traversal of the whole tree driven by [`SearchCursor::next_move`].
/// Yields every order when it is first reached.
pub fn enumerate_tree(n: usize) -> TreeWalk {
    TreeWalk { cursor: SearchCursor::root(n), fresh: true, done: false }
}

pub struct TreeWalk {
    cursor: SearchCursor,
    fresh: bool,
    done: bool,
}

impl Iterator for TreeWalk {
    type Item = TotalOrder;

    fn next(&mut self) -> Option<TotalOrder> {
        if self.done {
            return None;
        }
        loop {
            if self.fresh {
                self.fresh = false;
                return Some(self.cursor.current.clone());
            }
            let n = self.cursor.n();
            let m = self.cursor.next_move();
            if m.is_backtrack(n) {
                if !self.cursor.backtrack() {
                    self.done = true;
                    return None;
                }
            } else {
                self.cursor.advance(m).expect("standard moves are feasible");
                self.fresh = true;
            }
        }
    }
}
