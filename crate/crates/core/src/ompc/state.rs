use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::system::{SparseLoad, VarId, VariableSet};
use crate::{Error, Result};

/// Base `rho` of the exponential cost and the potential constant `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    rho: f64,
    gamma: f64,
}

impl Default for PotentialParams {
    /// `gamma = 2`, `rho = 1 + 1/gamma = 1.5`.
    fn default() -> Self {
        Self {
            rho: 1.5,
            gamma: 2.0,
        }
    }
}

impl PotentialParams {
    /// Requires `rho > 1`, `gamma > 1` and `rho <= 1 + 1/gamma`; the last
    /// condition is what keeps the potential non-increasing.
    pub fn new(rho: f64, gamma: f64) -> Result<Self> {
        if !(rho.is_finite() && gamma.is_finite()) || rho <= 1.0 || gamma <= 1.0 {
            return Err(Error::instance(format!(
                "potential parameters need rho > 1 and gamma > 1 (got rho = {rho}, gamma = {gamma})"
            )));
        }
        if rho > 1.0 + 1.0 / gamma + 1e-12 {
            return Err(Error::instance(format!(
                "rho = {rho} exceeds 1 + 1/gamma = {}",
                1.0 + 1.0 / gamma
            )));
        }
        Ok(Self { rho, gamma })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `rho^x`, evaluated as `exp(x ln rho)`.
    pub fn pow(&self, x: f64) -> f64 {
        (x * self.rho.ln()).exp()
    }

    /// `rho^(f + d) - rho^f`.
    pub fn increment(&self, f: f64, d: f64) -> f64 {
        self.pow(f) * (d * self.rho.ln()).exp_m1()
    }

    /// Cap on every scaled load `F_i` when an assignment with violation 1
    /// exists: `log_rho(gamma m / (gamma - 1))`.
    pub fn load_cap(&self, rows: usize) -> f64 {
        (self.gamma * rows as f64 / (self.gamma - 1.0)).ln() / self.rho.ln()
    }
}

/// One answered covering constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub set: VariableSet,
    pub delta: SparseLoad,
    pub tau: f64,
}

/// Accumulated scaled loads `F`, the chosen-set history and the committed
/// variables of one online run.
#[derive(Debug, Clone)]
pub struct SolverState {
    params: PotentialParams,
    loads: Vec<f64>,
    history: Vec<Step>,
    committed: BTreeSet<VarId>,
}

impl SolverState {
    pub fn new(rows: usize, params: PotentialParams) -> Self {
        Self {
            params,
            loads: vec![0.0; rows],
            history: Vec::new(),
            committed: BTreeSet::new(),
        }
    }

    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    pub fn loads(&self) -> &[f64] {
        &self.loads
    }

    pub fn load(&self, row: usize) -> f64 {
        self.loads[row]
    }

    pub fn max_load(&self) -> f64 {
        self.loads.iter().copied().fold(0.0, f64::max)
    }

    pub fn history(&self) -> &[Step] {
        &self.history
    }

    pub fn step(&self) -> usize {
        self.history.len()
    }

    pub fn committed(&self) -> &BTreeSet<VarId> {
        &self.committed
    }

    /// Cost of adding a set with scaled loads `delta` on top of the current
    /// loads. Rows absent from `delta` contribute nothing.
    pub fn tau(&self, delta: &[(usize, f64)]) -> f64 {
        delta
            .iter()
            .map(|&(row, d)| self.params.increment(self.loads[row], d))
            .sum()
    }

    /// Largest load after hypothetically adding `delta`.
    pub fn max_load_with(&self, delta: &[(usize, f64)]) -> f64 {
        let mut best = self.max_load();
        for &(row, d) in delta {
            best = best.max(self.loads[row] + d);
        }
        best
    }

    /// Appends a chosen set. Loads are updated by plain addition in the
    /// order of `delta`, so [`recompute_loads`](Self::recompute_loads)
    /// reproduces them bit for bit.
    pub fn commit(&mut self, set: VariableSet, delta: SparseLoad) -> &Step {
        let tau = self.tau(&delta);
        for &(row, d) in &delta {
            self.loads[row] += d;
        }
        self.committed.extend(set.iter());
        self.history.push(Step { set, delta, tau });
        self.history.last().expect("just pushed")
    }

    pub fn recompute_loads(&self) -> Vec<f64> {
        let mut loads = vec![0.0; self.loads.len()];
        for step in &self.history {
            for &(row, d) in &step.delta {
                loads[row] += d;
            }
        }
        loads
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn params_validation() {
        assert!(PotentialParams::new(1.5, 2.0).is_ok());
        assert!(PotentialParams::new(1.6, 2.0).is_err());
        assert!(PotentialParams::new(1.0, 2.0).is_err());
        assert!(PotentialParams::new(1.2, 1.0).is_err());
        assert_eq!(PotentialParams::default(), PotentialParams::new(1.5, 2.0).unwrap());
    }

    #[test]
    fn tau_examples() {
        let p = PotentialParams::default();
        let state = SolverState::new(2, p);
        assert_eq!(state.tau(&[]), 0.0);
        assert_relative_eq!(state.tau(&[(0, 1.0)]), 0.5, epsilon = 1e-15);
        assert_relative_eq!(
            state.tau(&[(0, 1.0), (1, 0.5)]),
            0.5 + (1.5f64.sqrt() - 1.0),
            epsilon = 1e-14
        );
        assert_relative_eq!(state.tau(&[(0, 1.0), (1, 0.5)]), 0.72474, epsilon = 1e-5);
    }

    #[test]
    fn load_cap_default_params() {
        let p = PotentialParams::default();
        // log_1.5(2m)
        assert_relative_eq!(p.load_cap(16), 32f64.ln() / 1.5f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(4.0 * p.load_cap(16), 34.19, epsilon = 5e-3);
    }

    #[test]
    fn commit_accumulates_and_reconstructs() {
        let mut s = SolverState::new(3, PotentialParams::default());
        s.commit(VariableSet::singleton(VarId(0)), vec![(0, 0.1), (2, 0.3)]);
        s.commit(VariableSet::singleton(VarId(0)), vec![(0, 0.2)]);
        s.commit(VariableSet::empty(), vec![]);
        assert_eq!(s.step(), 3);
        assert_eq!(s.committed().len(), 1);
        assert_eq!(s.recompute_loads(), s.loads());
        assert_eq!(s.loads()[0].to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(s.history()[2].tau, 0.0);
    }
}
