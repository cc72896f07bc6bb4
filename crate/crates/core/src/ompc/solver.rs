use std::collections::{BTreeSet, HashMap};

use super::state::{PotentialParams, SolverState};
use super::system::{delta_vector, satisfies, CoveringConstraint, PackingSystem, VarId, VariableSet};
use crate::oracles::SetOracle;
use crate::{Error, Result};

/// Result of answering one covering constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrival {
    /// 1-based arrival index.
    pub step: usize,
    pub set: VariableSet,
    pub tau: f64,
}

/// Anything that answers a stream of covering constraints irrevocably.
///
/// The adversary harness drives solvers through this trait, so alternative
/// strategies can be measured on the same constraint streams.
pub trait CoveringSolver {
    fn arrive(&mut self, c: &CoveringConstraint) -> Result<Arrival>;

    fn committed(&self) -> &BTreeSet<VarId>;
}

/// The exponential-cost online algorithm: each covering constraint is
/// answered by the satisfying set minimizing `tau` under the current loads,
/// and the chosen variables are set to one for good.
///
/// The system is held by value; pass a reference to borrow one.
pub struct OnlineSolver<S, O> {
    sys: S,
    oracle: O,
    state: SolverState,
    appearances: HashMap<VarId, usize>,
}

impl<S: PackingSystem, O: SetOracle> OnlineSolver<S, O> {
    pub fn new(sys: S, oracle: O, params: PotentialParams) -> Self {
        Self {
            state: SolverState::new(sys.num_constraints(), params),
            sys,
            oracle,
            appearances: HashMap::new(),
        }
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn system(&self) -> &S {
        &self.sys
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    fn record_frequency(&mut self, c: &CoveringConstraint) -> Result<()> {
        let k = self.sys.frequency();
        for var in c.support() {
            let seen = self.appearances.get(&var).copied().unwrap_or(0) + 1;
            if seen > k {
                return Err(Error::instance(format!(
                    "{var} appears in {seen} covering constraints, above the frequency bound k = {k}"
                )));
            }
        }
        for var in c.support() {
            *self.appearances.entry(var).or_insert(0) += 1;
        }
        Ok(())
    }

    pub fn arrive(&mut self, c: &CoveringConstraint) -> Result<Arrival> {
        let step = self.state.step() + 1;
        self.record_frequency(c)?;
        let set = self
            .oracle
            .select(c, &self.state, &self.sys)?
            .ok_or(Error::InfeasibleStep { step })?;
        if !satisfies(&set, c, &self.sys)? {
            return Err(Error::Invariant(format!(
                "oracle returned a set that does not satisfy constraint {step}"
            )));
        }
        let delta = delta_vector(&set, &self.sys)?;
        let tau = self.state.commit(set.clone(), delta).tau;
        Ok(Arrival { step, set, tau })
    }
}

impl<S: PackingSystem, O: SetOracle> CoveringSolver for OnlineSolver<S, O> {
    fn arrive(&mut self, c: &CoveringConstraint) -> Result<Arrival> {
        OnlineSolver::arrive(self, c)
    }

    fn committed(&self) -> &BTreeSet<VarId> {
        self.state.committed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ompc::{violation_profile, SparsePackingSystem};
    use crate::oracles::ExactOracle;
    use approx::assert_relative_eq;

    #[test]
    fn picks_cheaper_singleton() {
        let mut sys = SparsePackingSystem::new(1, 1).unwrap();
        let a = sys.add_variable("a", &[(0, 0.9)]).unwrap();
        let b = sys.add_variable("b", &[(0, 0.4)]).unwrap();
        let mut solver = OnlineSolver::new(&sys, ExactOracle::default(), PotentialParams::default());
        let c = CoveringConstraint::unit([a, b]).unwrap();
        let arrival = solver.arrive(&c).unwrap();
        assert_eq!(arrival.set, VariableSet::singleton(b));
        assert_relative_eq!(arrival.tau, 1.5f64.powf(0.4) - 1.0, epsilon = 1e-14);
        assert_relative_eq!(arrival.tau, 0.1761, epsilon = 1e-4);
        assert_eq!(solver.state().loads(), &[0.4]);
    }

    #[test]
    fn reselection_pays_again() {
        let mut sys = SparsePackingSystem::new(1, 2).unwrap();
        let a = sys.add_variable("a", &[(0, 0.8)]).unwrap();
        let mut solver = OnlineSolver::new(&sys, ExactOracle::default(), PotentialParams::default());
        let c = CoveringConstraint::unit([a]).unwrap();
        solver.arrive(&c).unwrap();
        solver.arrive(&c).unwrap();
        assert_relative_eq!(solver.state().loads()[0], 0.8, epsilon = 1e-15);
        let px = violation_profile(solver.state(), &sys).unwrap();
        assert_eq!(px, vec![0.8]);
        // third appearance breaks the frequency bound k = 2
        assert!(matches!(solver.arrive(&c), Err(Error::Instance(_))));
    }

    #[test]
    fn infeasible_step_is_reported() {
        let mut sys = SparsePackingSystem::new(1, 1).unwrap();
        let a = sys.add_variable("a", &[(0, 1.5)]).unwrap();
        let mut solver = OnlineSolver::new(&sys, ExactOracle::default(), PotentialParams::default());
        let err = solver.arrive(&CoveringConstraint::unit([a]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InfeasibleStep { step: 1 }));
    }

    #[test]
    fn violation_profile_of_empty_and_single() {
        let mut sys = SparsePackingSystem::new(2, 1).unwrap();
        let a = sys.add_variable("a", &[(0, 0.8)]).unwrap();
        let mut solver = OnlineSolver::new(&sys, ExactOracle::default(), PotentialParams::default());
        assert_eq!(violation_profile(solver.state(), &sys).unwrap(), vec![0.0, 0.0]);
        solver.arrive(&CoveringConstraint::unit([a]).unwrap()).unwrap();
        assert_eq!(violation_profile(solver.state(), &sys).unwrap(), vec![0.8, 0.0]);
    }
}
