//! Extended costs of the form `k∞ + c`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// A relaxation cost `k∞ + c`: `k` counts relaxed hard constraints and `c`
/// sums the weights of relaxed soft constraints.
///
/// Costs are totally ordered lexicographically on `(k, c)`, so any finite
/// cost (`k = 0`) is below every infinite one.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ExtendedCost {
    pub k: u32,
    pub c: f64,
}

impl ExtendedCost {
    pub const ZERO: ExtendedCost = ExtendedCost { k: 0, c: 0.0 };
    /// One relaxed hard constraint, nothing else. Also the "no solution yet"
    /// incumbent: no infinite cost compares strictly below it.
    pub const INFINITY: ExtendedCost = ExtendedCost { k: 1, c: 0.0 };

    pub fn new(k: u32, c: f64) -> Self {
        assert!(c.is_finite() && c >= 0.0, "soft cost must be finite and non-negative, got {c}");
        ExtendedCost { k, c }
    }

    pub fn finite(c: f64) -> Self {
        Self::new(0, c)
    }

    pub fn is_finite(&self) -> bool {
        self.k == 0
    }
}

/// Componentwise addition.
pub fn cost_add(a: ExtendedCost, b: ExtendedCost) -> ExtendedCost {
    ExtendedCost { k: a.k + b.k, c: a.c + b.c }
}

/// Strict lexicographic comparison on `(k, c)`.
pub fn cost_less(a: ExtendedCost, b: ExtendedCost) -> bool {
    a < b
}

impl PartialEq for ExtendedCost {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtendedCost {}

impl PartialOrd for ExtendedCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedCost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k.cmp(&other.k).then_with(|| self.c.total_cmp(&other.c))
    }
}

impl Add for ExtendedCost {
    type Output = ExtendedCost;

    fn add(self, rhs: ExtendedCost) -> ExtendedCost {
        cost_add(self, rhs)
    }
}

impl AddAssign for ExtendedCost {
    fn add_assign(&mut self, rhs: ExtendedCost) {
        *self = cost_add(*self, rhs);
    }
}

impl Sum for ExtendedCost {
    fn sum<I: Iterator<Item = ExtendedCost>>(iter: I) -> Self {
        iter.fold(ExtendedCost::ZERO, cost_add)
    }
}

impl<'a> Sum<&'a ExtendedCost> for ExtendedCost {
    fn sum<I: Iterator<Item = &'a ExtendedCost>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

impl fmt::Display for ExtendedCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.k, self.c) {
            (0, c) => write!(f, "{c}"),
            (1, 0.0) => write!(f, "∞"),
            (1, c) => write!(f, "∞+{c}"),
            (k, 0.0) => write!(f, "{k}∞"),
            (k, c) => write!(f, "{k}∞+{c}"),
        }
    }
}
