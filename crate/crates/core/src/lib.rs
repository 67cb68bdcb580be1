pub mod bench;
pub mod bounding;
pub mod cost;
pub mod error;
pub mod estimate;
pub mod model;
pub mod netcfg;
pub mod network;
pub mod oracle;
pub mod pruning;
pub mod solver;
pub mod stn;
pub mod theory;
pub mod tree;

pub use bounding::{init_bc, BoundId, BoundSource, BoundingConstraint, BoundingRegistry};
pub use cost::{cost_add, cost_less, ExtendedCost};
pub use error::{Error, Result};
pub use estimate::{estimate_cost, max_weight_clique, CliqueMode, DisjointnessGraph, Estimate};
pub use model::{ConstraintId, ConstraintKind, Event, OrderingProblem, PartialOrder, Relaxation, TotalOrder, Weight};
pub use tree::{OrderMove, SearchCursor};
