//! Online integral solver for bounded-frequency mixed packing/covering
//! programs, its application to online edge-weighted degree-bounded Steiner
//! forest, and the supporting machinery used to check its guarantees on
//! small instances: a lower-bound adversary, tree-splitting and connective
//! list constructions, randomized rounding, and brute-force offline optima.

pub mod adversary;
pub mod baseline;
pub mod error;
pub mod io;
pub mod ompc;
pub mod oracles;
pub mod seed;
pub mod steiner;
pub mod structural;
pub mod unionfind;

pub use error::{Error, Result};
pub use ompc::{
    CoveringConstraint, OnlineSolver, PackingSystem, PlantedCertificate, PotentialParams,
    SolverState, SparsePackingSystem, VarId, VariableSet,
};
