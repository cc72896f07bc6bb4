use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Simple undirected graph with positive edge weights and a degree bound
/// `b_v >= 1` per vertex.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    edges: Vec<Edge>,
    bounds: Vec<u32>,
    adjacency: Vec<Vec<(usize, EdgeId)>>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: &[(usize, usize, f64)], bounds: Vec<u32>) -> Result<Self> {
        if bounds.len() != n {
            return Err(Error::instance(format!(
                "expected {n} degree bounds, got {}",
                bounds.len()
            )));
        }
        if let Some(v) = bounds.iter().position(|&b| b == 0) {
            return Err(Error::instance(format!("vertex {v} has degree bound 0")));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (id, &(u, v, w)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::instance(format!("edge {id} ({u}, {v}) has an endpoint out of range")));
            }
            if u == v {
                return Err(Error::instance(format!("edge {id} is a self-loop on {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::instance(format!("edge {id} has non-positive weight {w}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::instance(format!("edge {id} duplicates ({u}, {v})")));
            }
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
            out.push(Edge { u, v, w });
        }
        Ok(Self {
            edges: out,
            bounds,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.bounds.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn bound(&self, v: usize) -> u32 {
        self.bounds[v]
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::min)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Largest over smallest edge weight.
    pub fn weight_ratio(&self) -> Option<f64> {
        let max = self.edges.iter().map(|e| e.w).reduce(f64::max)?;
        Some(max / self.min_weight()?)
    }

    /// Sum of weights, visiting edges in id order.
    pub fn weight_of(&self, edges: &[EdgeId]) -> f64 {
        let mut ids = edges.to_vec();
        ids.sort_unstable();
        ids.iter().map(|&e| self.edges[e].w).sum()
    }

    /// `deg_H(v)` for every vertex of an edge multiset `H`.
    pub fn degrees_of(&self, edges: &[EdgeId]) -> Vec<u32> {
        let mut deg = vec![0; self.n()];
        for &e in edges {
            deg[self.edges[e].u] += 1;
            deg[self.edges[e].v] += 1;
        }
        deg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demand {
    pub s: usize,
    pub t: usize,
}

/// Ordered connectivity demands.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DemandStream(Vec<Demand>);

impl DemandStream {
    pub fn new(graph: &WeightedGraph, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = graph.n();
        let mut out = Vec::with_capacity(pairs.len());
        for (i, &(s, t)) in pairs.iter().enumerate() {
            if s >= n || t >= n {
                return Err(Error::instance(format!("demand {i} ({s}, {t}) has an endpoint out of range")));
            }
            if s == t {
                return Err(Error::instance(format!("demand {i} has identical endpoints {s}")));
            }
            out.push(Demand { s, t });
        }
        Ok(Self(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Demand> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Demand] {
        &self.0
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.0.iter().map(|d| (d.s, d.t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_graphs() {
        assert!(WeightedGraph::new(2, &[(0, 1, 1.0)], vec![1]).is_err());
        assert!(WeightedGraph::new(2, &[(0, 1, 0.0)], vec![1, 1]).is_err());
        assert!(WeightedGraph::new(2, &[(0, 0, 1.0)], vec![1, 1]).is_err());
        assert!(WeightedGraph::new(2, &[(0, 1, 1.0), (1, 0, 2.0)], vec![1, 1]).is_err());
        assert!(WeightedGraph::new(2, &[(0, 2, 1.0)], vec![1, 1]).is_err());
        assert!(WeightedGraph::new(2, &[(0, 1, 1.0)], vec![1, 0]).is_err());
    }

    #[test]
    fn weight_ratio_and_degrees() {
        let g = WeightedGraph::new(3, &[(0, 1, 2.0), (1, 2, 8.0)], vec![1, 2, 1]).unwrap();
        assert_eq!(g.weight_ratio(), Some(4.0));
        assert_eq!(g.degrees_of(&[0, 1]), vec![1, 2, 1]);
        assert_eq!(g.weight_of(&[1, 0]), 10.0);
    }

    #[test]
    fn demand_validation() {
        let g = WeightedGraph::new(3, &[(0, 1, 1.0)], vec![1, 1, 1]).unwrap();
        assert!(DemandStream::new(&g, &[(0, 0)]).is_err());
        assert!(DemandStream::new(&g, &[(0, 3)]).is_err());
        assert_eq!(DemandStream::new(&g, &[(0, 2), (2, 1)]).unwrap().len(), 2);
    }
}
