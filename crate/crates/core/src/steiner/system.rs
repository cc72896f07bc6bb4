use std::collections::HashMap;

use super::graph::{EdgeId, WeightedGraph};
use crate::ompc::{PackingSystem, VarId};
use crate::{Error, Result};

/// Column of a subgraph variable `x_H^i`: row `v` holds `deg_H(v) / b_v`,
/// row `n` holds `w(H) / w_guess`. Edges are visited in id order.
pub fn subgraph_column(graph: &WeightedGraph, edges: &[EdgeId], w_guess: f64) -> Vec<(usize, f64)> {
    let deg = graph.degrees_of(edges);
    let mut column: Vec<(usize, f64)> = deg
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(v, &d)| (v, d as f64 / graph.bound(v) as f64))
        .collect();
    if !edges.is_empty() {
        column.push((graph.n(), graph.weight_of(edges) / w_guess));
    }
    column
}

/// The packing side of the subgraph program for one weight guess: `n`
/// degree rows and one weight row. Path variables are created lazily as the
/// oracle proposes them; each belongs to exactly one demand, so `k = 1`.
#[derive(Debug, Clone)]
pub struct PathSystem<'g> {
    graph: &'g WeightedGraph,
    w_guess: f64,
    vars: Vec<(usize, Vec<EdgeId>)>,
    columns: Vec<Vec<(usize, f64)>>,
    index: HashMap<(usize, Vec<EdgeId>), VarId>,
}

impl<'g> PathSystem<'g> {
    pub fn new(graph: &'g WeightedGraph, w_guess: f64) -> Result<Self> {
        if !(w_guess.is_finite() && w_guess > 0.0) {
            return Err(Error::instance(format!("weight guess {w_guess} must be positive")));
        }
        Ok(Self {
            graph,
            w_guess,
            vars: Vec::new(),
            columns: Vec::new(),
            index: HashMap::new(),
        })
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    pub fn w_guess(&self) -> f64 {
        self.w_guess
    }

    pub fn weight_row(&self) -> usize {
        self.graph.n()
    }

    /// Variable for subgraph `edges` chosen on behalf of demand `demand`.
    pub fn intern(&mut self, demand: usize, edges: &[EdgeId]) -> VarId {
        let mut key_edges = edges.to_vec();
        key_edges.sort_unstable();
        let key = (demand, key_edges);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = VarId(self.vars.len() as u32);
        self.columns
            .push(subgraph_column(self.graph, &key.1, self.w_guess));
        self.vars.push(key.clone());
        self.index.insert(key, id);
        id
    }

    pub fn variable(&self, var: VarId) -> Option<(usize, &[EdgeId])> {
        self.vars
            .get(var.0 as usize)
            .map(|(d, e)| (*d, e.as_slice()))
    }
}

impl PackingSystem for PathSystem<'_> {
    fn num_constraints(&self) -> usize {
        self.graph.n() + 1
    }

    fn frequency(&self) -> usize {
        1
    }

    fn column(&self, var: VarId) -> Result<&[(usize, f64)]> {
        self.columns
            .get(var.0 as usize)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::instance(format!("unknown path variable {var}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steiner::fixtures::sample_graph;

    #[test]
    fn sample_system_has_seven_rows() {
        let g = sample_graph();
        let sys = PathSystem::new(&g, 5.0).unwrap();
        assert_eq!(sys.num_constraints(), 7);
        assert_eq!(sys.frequency(), 1);
    }

    #[test]
    fn path_column_matches_degrees_and_weight() {
        let g = sample_graph();
        let mut sys = PathSystem::new(&g, 5.0).unwrap();
        // H1 = {v1v2, v1v4, v4v5}
        let h1 = [0, 1, 2];
        let var = sys.intern(0, &h1);
        let col = sys.column(var).unwrap();
        let weight = col.iter().find(|&&(r, _)| r == 6).unwrap().1;
        assert_eq!(weight, 3.0 / 5.0);
        let v4 = col.iter().find(|&&(r, _)| r == 3).unwrap().1;
        assert_eq!(v4, 2.0 / 3.0);
        assert_eq!(sys.intern(0, &[2, 1, 0]), var);
        assert_ne!(sys.intern(1, &h1), var);
    }

    #[test]
    fn empty_subgraph_has_empty_column() {
        let g = sample_graph();
        let mut sys = PathSystem::new(&g, 5.0).unwrap();
        let var = sys.intern(0, &[]);
        assert!(sys.column(var).unwrap().is_empty());
        assert!(PathSystem::new(&g, 0.0).is_err());
    }
}
