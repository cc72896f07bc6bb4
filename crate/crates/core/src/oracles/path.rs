//! Path oracles for the Steiner application.
//!
//! A demand `(s, t)` is served by a simple path in the graph where every
//! component of the contraction (endpoints of earlier demands joined by
//! virtual zero-weight edges) acts as one supernode. Inside a supernode the
//! path moves for free; only real edges are bought. A path enters each
//! interior supernode at one vertex and leaves it at one vertex, so a vertex
//! carries at most two path edges, and exactly two only when the path
//! enters and leaves its supernode there.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::ompc::{SolverState, SparseLoad, FEASIBILITY_EPS};
use crate::steiner::{subgraph_column, ContractionState, Demand, EdgeId, WeightedGraph};
use crate::{Error, Result};

/// Everything a path oracle needs besides the solver loads.
#[derive(Debug, Clone, Copy)]
pub struct PathQuery<'a> {
    pub graph: &'a WeightedGraph,
    pub contraction: &'a ContractionState,
    pub demand: Demand,
    pub w_guess: f64,
}

/// A chosen augmentation: real edges in path order from the side of `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathChoice {
    pub edges: Vec<EdgeId>,
    /// The objective the oracle minimized (separable surrogate or true cost).
    pub cost: f64,
    pub weight: f64,
}

impl PathChoice {
    fn empty() -> Self {
        Self {
            edges: Vec::new(),
            cost: 0.0,
            weight: 0.0,
        }
    }
}

pub trait PathSelector {
    /// Best path for the query, or `None` when no path fits the degree and
    /// weight limits.
    fn select_path(&self, q: &PathQuery<'_>, state: &SolverState) -> Result<Option<PathChoice>>;
}

/// Scaled loads of a set of real edges (frequency 1).
pub fn path_delta(graph: &WeightedGraph, edges: &[EdgeId], w_guess: f64) -> SparseLoad {
    subgraph_column(graph, edges, w_guess)
}

/// Per-edge separable cost: the increments each endpoint row and the weight
/// row would see if the edge were bought alone.
pub fn marginal_costs(graph: &WeightedGraph, state: &SolverState, w_guess: f64) -> Vec<f64> {
    graph
        .edges()
        .iter()
        .map(|e| edge_cost(graph, state, e.u, e.v, e.w, w_guess))
        .collect()
}

fn edge_cost(graph: &WeightedGraph, state: &SolverState, u: usize, v: usize, w: f64, w_guess: f64) -> f64 {
    let p = state.params();
    p.increment(state.load(u), 1.0 / graph.bound(u) as f64)
        + p.increment(state.load(v), 1.0 / graph.bound(v) as f64)
        + p.increment(state.load(graph.n()), w / w_guess)
}

/// Whether a vertex may carry two path edges.
fn pass_through_allowed(graph: &WeightedGraph, v: usize) -> bool {
    2.0 / graph.bound(v) as f64 <= 1.0 + FEASIBILITY_EPS
}

fn within_budget(weight: f64, w_guess: f64) -> bool {
    weight / w_guess <= 1.0 + FEASIBILITY_EPS
}

/// Supernode index per vertex plus the member lists, numbered by smallest
/// member so the numbering is deterministic.
struct Supernodes {
    of: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Supernodes {
    fn new(c: &ContractionState) -> Self {
        let n = c.n();
        let mut id_of_root = vec![usize::MAX; n];
        let mut of = vec![0; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            let r = c.component(v);
            if id_of_root[r] == usize::MAX {
                id_of_root[r] = members.len();
                members.push(Vec::new());
            }
            of[v] = id_of_root[r];
            members[id_of_root[r]].push(v);
        }
        Self { of, members }
    }
}

/// Minimizes the separable surrogate `sum_e marginal(e)` over simple
/// supernode paths within the weight budget, by label setting with
/// dominance on (cost, weight, visited supernodes).
///
/// The true cost of a path is at most `(rho + 1)` times its surrogate, and
/// the surrogate never exceeds the true cost, so the result is within that
/// factor of the best path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SurrogatePathOracle;

const MAX_SUPERNODES: usize = 128;

#[derive(Clone)]
struct Label {
    node: usize,
    /// Vertex through which the path entered `node`; `None` at the start.
    entry: Option<usize>,
    cost: f64,
    weight: f64,
    hops: usize,
    visited: u128,
    edge: Option<EdgeId>,
    pred: Option<usize>,
}

struct HeapEntry {
    cost: f64,
    hops: usize,
    label: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.hops.cmp(&self.hops))
            .then(other.label.cmp(&self.label))
    }
}

impl PathSelector for SurrogatePathOracle {
    fn select_path(&self, q: &PathQuery<'_>, state: &SolverState) -> Result<Option<PathChoice>> {
        let g = q.graph;
        let sn = Supernodes::new(q.contraction);
        let (src, dst) = (sn.of[q.demand.s], sn.of[q.demand.t]);
        if src == dst {
            return Ok(Some(PathChoice::empty()));
        }
        if sn.members.len() > MAX_SUPERNODES {
            return Err(Error::OracleCapacity {
                size: sn.members.len(),
                cap: MAX_SUPERNODES,
            });
        }
        let costs = marginal_costs(g, state, q.w_guess);

        let mut labels = vec![Label {
            node: src,
            entry: None,
            cost: 0.0,
            weight: 0.0,
            hops: 0,
            visited: 1 << src,
            edge: None,
            pred: None,
        }];
        // non-dominated labels per (supernode, entry vertex); the start uses slot n
        let mut front: Vec<Vec<usize>> = vec![Vec::new(); g.n() + 1];
        front[g.n()].push(0);
        let mut heap = BinaryHeap::from([HeapEntry {
            cost: 0.0,
            hops: 0,
            label: 0,
        }]);
        let mut dead = vec![false];

        while let Some(HeapEntry { label: id, .. }) = heap.pop() {
            if dead[id] {
                continue;
            }
            let cur = labels[id].clone();
            if cur.node == dst {
                return Ok(Some(unwind(&labels, id)));
            }
            for &x in &sn.members[cur.node] {
                if cur.entry == Some(x) && !pass_through_allowed(g, x) {
                    continue;
                }
                for &(y, e) in g.neighbors(x) {
                    let next = sn.of[y];
                    if cur.visited >> next & 1 == 1 {
                        continue;
                    }
                    let weight = cur.weight + g.edge(e).w;
                    if !within_budget(weight, q.w_guess) {
                        continue;
                    }
                    let cand = Label {
                        node: next,
                        entry: Some(y),
                        cost: cur.cost + costs[e],
                        weight,
                        hops: cur.hops + 1,
                        visited: cur.visited | 1 << next,
                        edge: Some(e),
                        pred: Some(id),
                    };
                    let slot = &mut front[y];
                    if slot.iter().any(|&o| dominates(&labels[o], &cand)) {
                        continue;
                    }
                    slot.retain(|&o| {
                        let keep = !dominates(&cand, &labels[o]);
                        if !keep {
                            dead[o] = true;
                        }
                        keep
                    });
                    let nid = labels.len();
                    heap.push(HeapEntry {
                        cost: cand.cost,
                        hops: cand.hops,
                        label: nid,
                    });
                    labels.push(cand);
                    dead.push(false);
                    slot.push(nid);
                }
            }
        }
        Ok(None)
    }
}

fn dominates(a: &Label, b: &Label) -> bool {
    a.cost <= b.cost && a.weight <= b.weight && a.visited & !b.visited == 0
}

fn unwind(labels: &[Label], mut id: usize) -> PathChoice {
    let (cost, weight) = (labels[id].cost, labels[id].weight);
    let mut edges = Vec::new();
    while let Some(e) = labels[id].edge {
        edges.push(e);
        id = labels[id].pred.expect("edge implies predecessor");
    }
    edges.reverse();
    PathChoice { edges, cost, weight }
}

/// Enumerates every simple supernode path within the weight budget and
/// returns the one with the smallest true cost. Ties go to fewer edges,
/// then to the lexicographically smallest sorted edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactPathOracle {
    max_vertices: usize,
}

impl Default for ExactPathOracle {
    fn default() -> Self {
        Self { max_vertices: 15 }
    }
}

impl ExactPathOracle {
    pub fn with_cap(max_vertices: usize) -> Self {
        Self { max_vertices }
    }
}

struct Enumeration<'a> {
    q: &'a PathQuery<'a>,
    state: &'a SolverState,
    sn: Supernodes,
    dst: usize,
    visited: Vec<bool>,
    path: Vec<EdgeId>,
    best: Option<(f64, Vec<EdgeId>, PathChoice)>,
}

impl Enumeration<'_> {
    fn offer(&mut self, weight: f64) {
        let tau = self.state.tau(&path_delta(self.q.graph, &self.path, self.q.w_guess));
        let mut key = self.path.clone();
        key.sort_unstable();
        let better = match &self.best {
            None => true,
            Some((bt, bk, _)) => match tau.total_cmp(bt) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => (key.len(), &key) < (bk.len(), bk),
            },
        };
        if better {
            let choice = PathChoice {
                edges: self.path.clone(),
                cost: tau,
                weight,
            };
            self.best = Some((tau, key, choice));
        }
    }

    fn extend(&mut self, node: usize, entry: Option<usize>, weight: f64) {
        if node == self.dst {
            self.offer(weight);
            return;
        }
        let g = self.q.graph;
        for i in 0..self.sn.members[node].len() {
            let x = self.sn.members[node][i];
            if entry == Some(x) && !pass_through_allowed(g, x) {
                continue;
            }
            for &(y, e) in g.neighbors(x) {
                let next = self.sn.of[y];
                let w = weight + g.edge(e).w;
                if self.visited[next] || !within_budget(w, self.q.w_guess) {
                    continue;
                }
                self.visited[next] = true;
                self.path.push(e);
                self.extend(next, Some(y), w);
                self.path.pop();
                self.visited[next] = false;
            }
        }
    }
}

impl PathSelector for ExactPathOracle {
    fn select_path(&self, q: &PathQuery<'_>, state: &SolverState) -> Result<Option<PathChoice>> {
        let n = q.graph.n();
        if n > self.max_vertices {
            return Err(Error::OracleCapacity {
                size: n,
                cap: self.max_vertices,
            });
        }
        let sn = Supernodes::new(q.contraction);
        let (src, dst) = (sn.of[q.demand.s], sn.of[q.demand.t]);
        if src == dst {
            return Ok(Some(PathChoice::empty()));
        }
        let mut visited = vec![false; sn.members.len()];
        visited[src] = true;
        let mut run = Enumeration {
            q,
            state,
            sn,
            dst,
            visited,
            path: Vec::new(),
            best: None,
        };
        run.extend(src, None, 0.0);
        Ok(run.best.map(|(_, _, c)| c))
    }
}

/// Runtime choice between the two path oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathOracleKind {
    #[default]
    Surrogate,
    Exact,
}

impl PathSelector for PathOracleKind {
    fn select_path(&self, q: &PathQuery<'_>, state: &SolverState) -> Result<Option<PathChoice>> {
        match self {
            PathOracleKind::Surrogate => SurrogatePathOracle.select_path(q, state),
            PathOracleKind::Exact => ExactPathOracle::default().select_path(q, state),
        }
    }
}
