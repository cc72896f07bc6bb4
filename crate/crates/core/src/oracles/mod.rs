//! Argmin oracles for the online solver.
//!
//! [`ExactOracle`] solves the generic selection by branch and bound over the
//! support of the arriving constraint. The Steiner application works over
//! an implicit universe of paths and uses [`SurrogatePathOracle`] (separable
//! lower bound of the cost, solved exactly as a resource-constrained
//! shortest path) or [`ExactPathOracle`] (enumeration of simple paths, used
//! as ground truth on small graphs).

mod exact;
mod path;

pub use exact::ExactOracle;
pub use path::{
    marginal_costs, path_delta, ExactPathOracle, PathChoice, PathOracleKind, PathQuery, PathSelector,
    SurrogatePathOracle,
};

use crate::ompc::{CoveringConstraint, PackingSystem, SolverState, VariableSet};
use crate::Result;

pub trait SetOracle {
    /// A set satisfying `c` (covers it and keeps every row's scaled load of
    /// the set itself at most 1), or `None` when no such set exists.
    fn select(
        &self,
        c: &CoveringConstraint,
        state: &SolverState,
        sys: &dyn PackingSystem,
    ) -> Result<Option<VariableSet>>;
}

impl<T: SetOracle + ?Sized> SetOracle for &T {
    fn select(
        &self,
        c: &CoveringConstraint,
        state: &SolverState,
        sys: &dyn PackingSystem,
    ) -> Result<Option<VariableSet>> {
        (**self).select(c, state, sys)
    }
}
