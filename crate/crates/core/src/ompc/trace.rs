use std::fmt::Write as _;

use serde::Serialize;

use super::certificate::PlantedCertificate;
use super::solver::OnlineSolver;
use super::state::{PotentialParams, SolverState};
use super::system::{CoveringConstraint, PackingSystem, VariableSet};
use super::violation_profile;
use crate::oracles::SetOracle;
use crate::Result;

/// State after one arrival.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub set_size: usize,
    pub tau: f64,
    pub max_load: f64,
    /// `max_i P_i . x`.
    pub max_violation: f64,
    pub phi: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TracedRun {
    pub rows: Vec<TraceRow>,
    pub state: SolverState,
    /// Potential before the first arrival, when a certificate is known.
    pub phi0: Option<f64>,
}

/// Feeds `covering` to a fresh solver and records one row per arrival.
/// With a certificate, its increments are applied before each arrival is
/// answered so `phi` tracks the potential step by step.
pub fn run_traced<O: SetOracle>(
    sys: &dyn PackingSystem,
    covering: &[CoveringConstraint],
    certificate: Option<&VariableSet>,
    oracle: O,
    params: PotentialParams,
) -> Result<TracedRun> {
    let mut cert = certificate.map(|x| PlantedCertificate::new(x.clone(), sys)).transpose()?;
    let mut solver = OnlineSolver::new(sys, oracle, params);
    let phi0 = cert.as_ref().map(|c| c.phi(solver.state())).transpose()?;
    let mut rows = Vec::with_capacity(covering.len());
    for c in covering {
        if let Some(cert) = cert.as_mut() {
            cert.observe(c, sys)?;
        }
        let arrival = solver.arrive(c)?;
        let profile = violation_profile(solver.state(), sys)?;
        rows.push(TraceRow {
            step: arrival.step,
            set_size: arrival.set.len(),
            tau: arrival.tau,
            max_load: solver.state().max_load(),
            max_violation: profile.into_iter().fold(0.0, f64::max),
            phi: cert.as_ref().map(|c| c.phi(solver.state())).transpose()?,
        });
    }
    Ok(TracedRun {
        rows,
        state: solver.state().clone(),
        phi0,
    })
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("step,chosen_set_size,tau,max_f,max_violation,phi\n");
    for r in rows {
        let phi = r.phi.map(|p| p.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.step, r.set_size, r.tau, r.max_load, r.max_violation, phi
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ompc::SparsePackingSystem;
    use crate::oracles::ExactOracle;

    #[test]
    fn potential_is_tracked() {
        let mut sys = SparsePackingSystem::new(2, 1).unwrap();
        let a = sys.add_variable("a", &[(0, 1.0)]).unwrap();
        let b = sys.add_variable("b", &[(1, 1.0)]).unwrap();
        let cs = [
            CoveringConstraint::unit([a, b]).unwrap(),
            CoveringConstraint::unit([b]).unwrap(),
        ];
        let cert = VariableSet::new(vec![b]);
        let run = run_traced(&sys, &cs[1..], Some(&cert), ExactOracle::default(), PotentialParams::default()).unwrap();
        assert_eq!(run.phi0, Some(4.0));
        assert_eq!(run.rows.len(), 1);
        let phi = run.rows[0].phi.unwrap();
        assert!(phi <= 4.0 + 1e-9);
        let csv = trace_csv(&run.rows);
        assert!(csv.starts_with("step,chosen_set_size,tau,max_f,max_violation,phi\n1,1,"));
    }
}
