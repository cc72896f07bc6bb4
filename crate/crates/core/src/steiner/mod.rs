//! Online edge-weighted degree-bounded Steiner forest on top of the generic
//! solver.
//!
//! Each demand is one covering constraint over the subgraphs that connect
//! it once the endpoints of earlier demands are treated as already joined.
//! The packing side has one row per vertex (degree over bound) and one row
//! for total weight over a guess of the optimal weight. When the optimal
//! weight is unknown, [`run_with_doubling`] grows the guess geometrically.

mod contraction;
mod doubling;
mod engine;
pub mod fixtures;
mod graph;
mod report;
mod system;

pub use contraction::ContractionState;
pub use doubling::{run_with_doubling, DoublingOutcome, PhaseEnd, PhaseRecord};
pub use engine::{Augmentation, OnlineSolution, SteinerEngine};
pub use graph::{Demand, DemandStream, Edge, EdgeId, WeightedGraph};
pub use report::{per_demand_csv, DemandRecord, RatioReport};
pub use system::{subgraph_column, PathSystem};
