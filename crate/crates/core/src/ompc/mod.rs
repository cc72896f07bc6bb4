//! Deterministic online solver for mixed packing/covering integer programs
//! in which every variable has a positive coefficient in at most `k`
//! covering constraints.
//!
//! Packing rows are known up front and accessed column by column, so the
//! variable universe can be huge (one variable per subgraph, say) as long as
//! a [`SetOracle`](crate::oracles::SetOracle) can pick the next set. Each
//! arriving covering constraint is answered with the satisfying set of
//! minimum exponential cost
//!
//! ```text
//! tau(S) = sum_i rho^(F_i + delta_i(S)) - rho^(F_i)
//! ```
//!
//! where `F_i` is the (1/k)-scaled load already charged to row `i`.

mod binarize;
mod certificate;
mod solver;
mod state;
mod system;
mod trace;

pub use binarize::BinaryExpansion;
pub use certificate::PlantedCertificate;
pub use solver::{Arrival, CoveringSolver, OnlineSolver};
pub use state::{PotentialParams, SolverState, Step};
pub use trace::{run_traced, trace_csv, TraceRow, TracedRun};
pub use system::{
    delta, delta_vector, satisfies, CoveringConstraint, PackingSystem, SparseLoad,
    SparsePackingSystem, VarId, VariableSet, FEASIBILITY_EPS,
};

/// Packing load `P_i . x` of every row for the committed variables.
///
/// Errors when the committed set contradicts `P_i . x <= k F_i`, which holds
/// for any run where each variable sat in at most `k` chosen sets.
pub fn violation_profile(state: &SolverState, sys: &dyn PackingSystem) -> crate::Result<Vec<f64>> {
    let mut load = vec![0.0; sys.num_constraints()];
    for &var in state.committed() {
        for &(row, coeff) in sys.column(var)? {
            load[row] += coeff;
        }
    }
    let k = sys.frequency() as f64;
    for (row, (&px, &f)) in load.iter().zip(state.loads()).enumerate() {
        if px > k * f + 1e-9 * (1.0 + k * f) {
            return Err(crate::Error::Invariant(format!(
                "row {row}: P.x = {px} exceeds k*F = {}",
                k * f
            )));
        }
    }
    Ok(load)
}
