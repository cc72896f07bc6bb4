use super::contraction::ContractionState;
use super::graph::{Demand, DemandStream, EdgeId, WeightedGraph};
use super::system::PathSystem;
use crate::ompc::{PackingSystem, PotentialParams, SolverState, SparseLoad, VarId, VariableSet};
use crate::oracles::{path_delta, PathChoice, PathQuery, PathSelector};
use crate::unionfind::UnionFind;
use crate::{Error, Result};

/// Real edges bought for one demand.
#[derive(Debug, Clone, PartialEq)]
pub struct Augmentation {
    pub demand: usize,
    pub edges: Vec<EdgeId>,
    pub weight: f64,
    pub tau: f64,
}

/// Everything bought so far. Edges reused by several demands are counted
/// once per demand, as the subgraph program charges them.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineSolution {
    augmentations: Vec<Augmentation>,
    degree: Vec<u32>,
    weight: f64,
}

impl OnlineSolution {
    pub fn new(n: usize) -> Self {
        Self {
            augmentations: Vec::new(),
            degree: vec![0; n],
            weight: 0.0,
        }
    }

    pub fn augmentations(&self) -> &[Augmentation] {
        &self.augmentations
    }

    /// `sum_i deg_{H_i}(v)` per vertex.
    pub fn degree(&self) -> &[u32] {
        &self.degree
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn push(&mut self, graph: &WeightedGraph, aug: Augmentation) {
        for &e in &aug.edges {
            let edge = graph.edge(e);
            self.degree[edge.u] += 1;
            self.degree[edge.v] += 1;
        }
        self.weight += aug.weight;
        self.augmentations.push(aug);
    }

    /// `max_v deg(v) / b_v`.
    pub fn degree_violation(&self, graph: &WeightedGraph) -> f64 {
        self.degree
            .iter()
            .enumerate()
            .map(|(v, &d)| d as f64 / graph.bound(v) as f64)
            .fold(0.0, f64::max)
    }

    /// Packing rows of the subgraph program evaluated at this solution for
    /// weight guess `w_guess`: the degree rows, then the weight row.
    pub fn packing_loads(&self, graph: &WeightedGraph, w_guess: f64) -> Vec<f64> {
        let mut loads: Vec<f64> = self
            .degree
            .iter()
            .enumerate()
            .map(|(v, &d)| d as f64 / graph.bound(v) as f64)
            .collect();
        loads.push(self.weight / w_guess);
        loads
    }

    /// Whether the real edges alone connect every demand served so far.
    pub fn connects(&self, graph: &WeightedGraph, demands: &[Demand]) -> bool {
        let mut uf = UnionFind::new(graph.n());
        for aug in &self.augmentations {
            for &e in &aug.edges {
                uf.union(graph.edge(e).u, graph.edge(e).v);
            }
        }
        demands.iter().all(|d| uf.connected(d.s, d.t))
    }
}

/// A path the oracle proposed but that has not been bought yet.
#[derive(Debug, Clone)]
pub struct Plan {
    pub choice: PathChoice,
    pub delta: SparseLoad,
    pub tau: f64,
}

/// One phase of the online algorithm for a fixed weight guess.
pub struct SteinerEngine<'g, P> {
    graph: &'g WeightedGraph,
    system: PathSystem<'g>,
    state: SolverState,
    contraction: ContractionState,
    solution: OnlineSolution,
    selector: P,
    served: usize,
}

impl<'g, P: PathSelector> SteinerEngine<'g, P> {
    pub fn new(graph: &'g WeightedGraph, w_guess: f64, selector: P, params: PotentialParams) -> Result<Self> {
        Self::resume(graph, w_guess, selector, params, ContractionState::new(graph.n()), 0)
    }

    /// Starts with fresh loads but keeps the contraction of the first
    /// `served` demands, as after a restart of the weight guess.
    pub fn resume(
        graph: &'g WeightedGraph,
        w_guess: f64,
        selector: P,
        params: PotentialParams,
        contraction: ContractionState,
        served: usize,
    ) -> Result<Self> {
        let system = PathSystem::new(graph, w_guess)?;
        let state = SolverState::new(system.num_constraints(), params);
        Ok(Self {
            graph,
            system,
            state,
            contraction,
            solution: OnlineSolution::new(graph.n()),
            selector,
            served,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn w_guess(&self) -> f64 {
        self.system.w_guess()
    }

    pub fn system(&self) -> &PathSystem<'g> {
        &self.system
    }

    pub fn contraction(&self) -> &ContractionState {
        &self.contraction
    }

    pub fn solution(&self) -> &OnlineSolution {
        &self.solution
    }

    pub fn served(&self) -> usize {
        self.served
    }

    pub fn into_parts(self) -> (ContractionState, OnlineSolution, SolverState) {
        (self.contraction, self.solution, self.state)
    }

    /// Cheapest path for `demand` under the current loads.
    pub fn plan(&self, demand: Demand) -> Result<Option<Plan>> {
        let q = PathQuery {
            graph: self.graph,
            contraction: &self.contraction,
            demand,
            w_guess: self.system.w_guess(),
        };
        Ok(self.selector.select_path(&q, &self.state)?.map(|choice| {
            let delta = path_delta(self.graph, &choice.edges, self.system.w_guess());
            let tau = self.state.tau(&delta);
            Plan { choice, delta, tau }
        }))
    }

    /// Buys a planned path for the next demand.
    pub fn commit(&mut self, demand: Demand, plan: Plan) -> Result<&Augmentation> {
        let idx = self.served;
        let var: VarId = self.system.intern(idx, &plan.choice.edges);
        let column = self.system.column(var)?;
        if column != plan.delta.as_slice() {
            return Err(Error::Invariant(format!("column of demand {idx} does not match its plan")));
        }
        self.state.commit(VariableSet::singleton(var), plan.delta);
        self.contraction.add(demand);
        self.served += 1;
        let aug = Augmentation {
            demand: idx,
            weight: self.graph.weight_of(&plan.choice.edges),
            edges: plan.choice.edges,
            tau: plan.tau,
        };
        self.solution.push(self.graph, aug);
        Ok(self.solution.augmentations().last().expect("just pushed"))
    }

    /// Serves the next demand, or fails with `InfeasibleStep` when no path
    /// fits the current weight guess.
    pub fn serve(&mut self, demand: Demand) -> Result<&Augmentation> {
        let plan = self
            .plan(demand)?
            .ok_or(Error::InfeasibleStep { step: self.served + 1 })?;
        self.commit(demand, plan)
    }

    /// Serves a whole stream with the guess fixed.
    pub fn serve_all(&mut self, stream: &DemandStream) -> Result<()> {
        for d in stream.iter().skip(self.served) {
            self.serve(d)?;
        }
        Ok(())
    }
}
