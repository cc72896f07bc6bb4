use std::fmt::Write as _;

use serde::Serialize;

use super::engine::OnlineSolution;
use super::graph::WeightedGraph;
use crate::ompc::PotentialParams;

/// Realized quality of an online solution against offline optima.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub weight: f64,
    pub w_opt: f64,
    /// Bought weight over the optimal forest weight.
    pub weight_ratio: f64,
    /// `max_v deg(v) / b_v`.
    pub degree_violation: f64,
    /// Largest packing row of the subgraph program at the guess used.
    pub max_packing_load: f64,
    /// `log_rho(gamma (n + 1) / (gamma - 1))` with frequency 1.
    pub load_cap: f64,
    /// Optimal violation of the subgraph program, when brute-forced.
    pub ip_alpha: Option<f64>,
    /// `load_cap * ip_alpha`.
    pub scaled_cap: Option<f64>,
}

impl RatioReport {
    pub fn new(
        solution: &OnlineSolution,
        graph: &WeightedGraph,
        w_opt: f64,
        w_guess: f64,
        ip_alpha: Option<f64>,
        params: &PotentialParams,
    ) -> Self {
        let load_cap = params.load_cap(graph.n() + 1);
        let max_packing_load = solution
            .packing_loads(graph, w_guess)
            .into_iter()
            .fold(0.0, f64::max);
        Self {
            weight: solution.weight(),
            w_opt,
            weight_ratio: solution.weight() / w_opt,
            degree_violation: solution.degree_violation(graph),
            max_packing_load,
            load_cap,
            ip_alpha,
            scaled_cap: ip_alpha.map(|a| a * load_cap),
        }
    }

    /// Whether the packing load stays within the scaled cap (when known).
    pub fn within_cap(&self) -> Option<bool> {
        self.scaled_cap.map(|cap| self.max_packing_load <= cap)
    }
}

/// One line of the per-demand trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemandRecord {
    pub demand: usize,
    pub edges: usize,
    pub weight: f64,
    /// Running `max_v deg(v) / b_v` after this demand.
    pub max_degree_load: f64,
    pub phase: usize,
}

impl DemandRecord {
    /// Trace of a solution; `phases[i]` is the phase of demand `i`, or 1
    /// for all demands when no doubling was used.
    pub fn trace(solution: &OnlineSolution, graph: &WeightedGraph, phases: Option<&[usize]>) -> Vec<Self> {
        let mut deg = vec![0u32; graph.n()];
        solution
            .augmentations()
            .iter()
            .enumerate()
            .map(|(i, aug)| {
                for &e in &aug.edges {
                    deg[graph.edge(e).u] += 1;
                    deg[graph.edge(e).v] += 1;
                }
                let max_degree_load = deg
                    .iter()
                    .enumerate()
                    .map(|(v, &d)| d as f64 / graph.bound(v) as f64)
                    .fold(0.0, f64::max);
                DemandRecord {
                    demand: aug.demand,
                    edges: aug.edges.len(),
                    weight: aug.weight,
                    max_degree_load,
                    phase: phases.map_or(1, |p| p[i]),
                }
            })
            .collect()
    }
}

pub fn per_demand_csv(records: &[DemandRecord]) -> String {
    let mut out = String::from("demand,edges,weight,max_degree_load,phase\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.demand, r.edges, r.weight, r.max_degree_load, r.phase
        );
    }
    out
}
