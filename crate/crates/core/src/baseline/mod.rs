//! Exact offline optima by exhaustive search, for small instances only.
//! They are the ground truth the online results are measured against.

mod cache;
mod ipgood;
mod ompc;
mod steiner;

pub use cache::ResultCache;
pub use ipgood::{offline_ipgood_opt, IPGOOD_PRODUCT_CAP};
pub use ompc::{offline_ompc_opt, ompc_violation, OMPC_VARIABLE_CAP};
pub use steiner::{offline_steiner_opt, validate_forest, STEINER_EDGE_CAP};

use serde::{Deserialize, Serialize};

use crate::ompc::VarId;
use crate::steiner::EdgeId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Variables set to one.
    Variables(Vec<VarId>),
    /// Edges of a forest.
    Edges(Vec<EdgeId>),
    /// One edge set per demand.
    Subgraphs(Vec<Vec<EdgeId>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineResult {
    /// Violation for packing/covering programs, weight for forests.
    pub objective: f64,
    pub witness: Witness,
    /// Search nodes visited.
    pub nodes: u64,
}
