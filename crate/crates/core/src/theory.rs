//! The interface between the ordering search and the sub-solvers behind `g`
//! and `f`.

use crate::bounding::BoundingConstraint;
use crate::model::{OrderingProblem, Relaxation, TotalOrder};

/// Optimal relaxation of the theory constraints under a total order, plus
/// extraction of bounding constraints explaining it.
pub trait Theory {
    fn evaluate(&mut self, order: &TotalOrder) -> Relaxation;

    /// Called right after [`Theory::evaluate`] on the same order, so
    /// implementations may reuse what the evaluation computed.
    fn extract(&mut self, order: &TotalOrder) -> Vec<BoundingConstraint>;
}

/// No theory constraints at all.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoTheory;

impl Theory for NoTheory {
    fn evaluate(&mut self, _: &TotalOrder) -> Relaxation {
        Relaxation::default()
    }

    fn extract(&mut self, _: &TotalOrder) -> Vec<BoundingConstraint> {
        Vec::new()
    }
}

impl<T: Theory + ?Sized> Theory for Box<T> {
    fn evaluate(&mut self, order: &TotalOrder) -> Relaxation {
        (**self).evaluate(order)
    }

    fn extract(&mut self, order: &TotalOrder) -> Vec<BoundingConstraint> {
        (**self).extract(order)
    }
}

/// Full `g`: violated ordering constraints plus the theory's relaxation.
pub fn evaluate_g(problem: &OrderingProblem, theory: &mut dyn Theory, order: &TotalOrder) -> Relaxation {
    let mut rel = problem.ordering_relaxation(order);
    rel.merge(theory.evaluate(order));
    rel
}
