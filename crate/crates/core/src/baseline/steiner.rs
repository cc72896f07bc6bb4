use super::{OfflineResult, Witness};
use crate::steiner::{Demand, EdgeId, WeightedGraph};
use crate::unionfind::UnionFind;
use crate::{Error, Result};

pub const STEINER_EDGE_CAP: usize = 18;

/// Checks that `edges` respect every degree bound and connect every demand.
pub fn validate_forest(graph: &WeightedGraph, demands: &[Demand], edges: &[EdgeId]) -> bool {
    let deg = graph.degrees_of(edges);
    if deg.iter().enumerate().any(|(v, &d)| d > graph.bound(v)) {
        return false;
    }
    let mut uf = UnionFind::new(graph.n());
    for &e in edges {
        uf.union(graph.edge(e).u, graph.edge(e).v);
    }
    demands.iter().all(|d| uf.connected(d.s, d.t))
}

struct Search<'a> {
    graph: &'a WeightedGraph,
    demands: &'a [Demand],
    order: Vec<EdgeId>,
    deg: Vec<u32>,
    chosen: Vec<EdgeId>,
    best: Option<(f64, Vec<EdgeId>)>,
    nodes: u64,
}

impl Search<'_> {
    fn connected_with(&self, extra: &[EdgeId]) -> bool {
        let mut uf = UnionFind::new(self.graph.n());
        for &e in self.chosen.iter().chain(extra) {
            uf.union(self.graph.edge(e).u, self.graph.edge(e).v);
        }
        self.demands.iter().all(|d| uf.connected(d.s, d.t))
    }

    fn better(&self, weight: f64, edges: &[EdgeId]) -> bool {
        match &self.best {
            None => true,
            Some((bw, be)) => weight < *bw || (weight == *bw && edges < be.as_slice()),
        }
    }

    fn run(&mut self, i: usize, weight: f64) {
        self.nodes += 1;
        if self.best.as_ref().is_some_and(|b| weight > b.0) {
            return;
        }
        if self.connected_with(&[]) {
            let mut edges = self.chosen.clone();
            edges.sort_unstable();
            if self.better(weight, &edges) {
                self.best = Some((weight, edges));
            }
            return;
        }
        if i == self.order.len() || !self.connected_with(&self.order[i..]) {
            return;
        }
        let e = self.order[i];
        let edge = *self.graph.edge(e);
        if self.deg[edge.u] < self.graph.bound(edge.u) && self.deg[edge.v] < self.graph.bound(edge.v) {
            self.deg[edge.u] += 1;
            self.deg[edge.v] += 1;
            self.chosen.push(e);
            self.run(i + 1, weight + edge.w);
            self.chosen.pop();
            self.deg[edge.u] -= 1;
            self.deg[edge.v] -= 1;
        }
        self.run(i + 1, weight);
    }
}

/// Minimum-weight edge set that connects every demand without exceeding
/// any degree bound. Ties go to the lexicographically smallest edge list.
pub fn offline_steiner_opt(graph: &WeightedGraph, demands: &[Demand]) -> Result<OfflineResult> {
    let m = graph.edges().len();
    if m > STEINER_EDGE_CAP {
        return Err(Error::Capacity {
            what: "edge set",
            size: m,
            cap: STEINER_EDGE_CAP,
        });
    }
    let mut order: Vec<EdgeId> = (0..m).collect();
    order.sort_by(|&a, &b| graph.edge(b).w.total_cmp(&graph.edge(a).w).then(a.cmp(&b)));
    let mut search = Search {
        graph,
        demands,
        order,
        deg: vec![0; graph.n()],
        chosen: Vec::new(),
        best: None,
        nodes: 0,
    };
    search.run(0, 0.0);
    let (_, edges) = search.best.ok_or(Error::Infeasible)?;
    if !validate_forest(graph, demands, &edges) {
        return Err(Error::Invariant("offline forest does not re-validate".into()));
    }
    Ok(OfflineResult {
        objective: graph.weight_of(&edges),
        witness: Witness::Edges(edges),
        nodes: search.nodes,
    })
}
