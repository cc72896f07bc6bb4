use super::state::SolverState;
use super::system::{CoveringConstraint, PackingSystem, VariableSet, FEASIBILITY_EPS};
use crate::{Error, Result};

/// A known binary assignment with violation 1, used to evaluate the
/// potential `Phi_j = sum_i rho^(F_i) (gamma - G_i(j))`.
///
/// `G_i(j)` accumulates, over the constraints seen so far, the scaled load
/// the certificate places on row `i` using only variables in each
/// constraint's support.
#[derive(Debug, Clone)]
pub struct PlantedCertificate {
    x_star: VariableSet,
    g: Vec<f64>,
    observed: usize,
}

impl PlantedCertificate {
    /// Checks `P_i . x* <= 1` for every row.
    pub fn new(x_star: VariableSet, sys: &dyn PackingSystem) -> Result<Self> {
        let mut load = vec![0.0; sys.num_constraints()];
        for var in x_star.iter() {
            for &(row, coeff) in sys
                .column(var)
                .map_err(|e| Error::Certificate(e.to_string()))?
            {
                load[row] += coeff;
            }
        }
        if let Some((row, &l)) = load
            .iter()
            .enumerate()
            .find(|(_, &l)| l > 1.0 + FEASIBILITY_EPS)
        {
            return Err(Error::Certificate(format!(
                "packing row {row} has load {l} > 1 under the certificate"
            )));
        }
        Ok(Self {
            x_star,
            g: vec![0.0; sys.num_constraints()],
            observed: 0,
        })
    }

    pub fn assignment(&self) -> &VariableSet {
        &self.x_star
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn observed(&self) -> usize {
        self.observed
    }

    /// Certificate variables in the support of `c`.
    pub fn witness(&self, c: &CoveringConstraint) -> VariableSet {
        self.x_star.iter().filter(|&v| c.coeff(v) > 0.0).collect()
    }

    /// Checks that the certificate covers `c` without updating `G`.
    pub fn check(&self, c: &CoveringConstraint) -> Result<()> {
        let coverage = c.coverage(&self.x_star);
        if coverage < 1.0 - FEASIBILITY_EPS {
            return Err(Error::Certificate(format!(
                "covering constraint has coverage {coverage} < 1 under the certificate"
            )));
        }
        Ok(())
    }

    /// Validates the certificate against the next constraint and adds the
    /// per-row increment `B_i(j+1)` to `G`. Returns the increment.
    pub fn observe(&mut self, c: &CoveringConstraint, sys: &dyn PackingSystem) -> Result<Vec<f64>> {
        self.check(c)?;
        let k = sys.frequency() as f64;
        let mut b = vec![0.0; self.g.len()];
        for var in self.witness(c).iter() {
            for &(row, coeff) in sys.column(var)? {
                b[row] += coeff / k;
            }
        }
        for (g, inc) in self.g.iter_mut().zip(&b) {
            *g += inc;
        }
        self.observed += 1;
        Ok(b)
    }

    pub fn phi(&self, state: &SolverState) -> Result<f64> {
        if state.loads().len() != self.g.len() {
            return Err(Error::Certificate(format!(
                "certificate has {} rows but the solver has {}",
                self.g.len(),
                state.loads().len()
            )));
        }
        let p = state.params();
        Ok(state
            .loads()
            .iter()
            .zip(&self.g)
            .map(|(&f, &g)| p.pow(f) * (p.gamma() - g))
            .sum())
    }
}
