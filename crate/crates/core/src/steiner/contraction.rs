use super::graph::Demand;
use crate::unionfind::UnionFind;

/// Virtual zero-weight edges joining the endpoints of the demands served so
/// far, with the induced vertex partition.
#[derive(Debug, Clone)]
pub struct ContractionState {
    uf: UnionFind,
    virtual_edges: Vec<(usize, usize)>,
}

impl ContractionState {
    pub fn new(n: usize) -> Self {
        Self {
            uf: UnionFind::new(n),
            virtual_edges: Vec::new(),
        }
    }

    /// State after the first `i` demands.
    pub fn from_prefix(n: usize, demands: &[Demand]) -> Self {
        let mut state = Self::new(n);
        for &d in demands {
            state.add(d);
        }
        state
    }

    pub fn add(&mut self, d: Demand) {
        self.uf.union(d.s, d.t);
        self.virtual_edges.push((d.s, d.t));
    }

    pub fn virtual_edges(&self) -> &[(usize, usize)] {
        &self.virtual_edges
    }

    pub fn component(&self, v: usize) -> usize {
        self.uf.root(v)
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.uf.root(a) == self.uf.root(b)
    }

    pub fn n(&self) -> usize {
        self.uf.len()
    }

    /// Members of every component, indexed by the component's root.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n()];
        for v in 0..self.n() {
            groups[self.component(v)].push(v);
        }
        groups
    }
}
