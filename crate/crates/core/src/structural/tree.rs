use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result};

/// Undirected edge stored with the smaller endpoint first.
pub type TreeEdge = (usize, usize);

pub(crate) fn norm(a: usize, b: usize) -> TreeEdge {
    (a.min(b), a.max(b))
}

/// A tree over arbitrary vertex labels, rooted at its smallest label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    vertices: Vec<usize>,
    edges: Vec<TreeEdge>,
    index: HashMap<usize, usize>,
    adj: Vec<Vec<usize>>,
}

/// Parent pointers, depths and BFS order from the root, by local index.
pub(crate) struct Rooted {
    pub order: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
}

impl Tree {
    /// Validates that `edges` form a spanning tree of `vertices`.
    pub fn new(mut vertices: Vec<usize>, edges: &[(usize, usize)]) -> Result<Self> {
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::instance("tree has no vertices"));
        }
        let index: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        if edges.len() + 1 != vertices.len() {
            return Err(Error::instance(format!(
                "{} edges cannot span a tree on {} vertices",
                edges.len(),
                vertices.len()
            )));
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        let mut norm_edges = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) else {
                return Err(Error::instance(format!("edge ({a}, {b}) leaves the vertex set")));
            };
            if ia == ib {
                return Err(Error::instance(format!("self-loop on {a}")));
            }
            adj[ia].push(ib);
            adj[ib].push(ia);
            norm_edges.push(norm(a, b));
        }
        norm_edges.sort_unstable();
        if norm_edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::instance("tree has a repeated edge"));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let tree = Self {
            vertices,
            edges: norm_edges,
            index,
            adj,
        };
        if tree.rooted().order.len() != tree.len() {
            return Err(Error::instance("edges do not connect the tree"));
        }
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Sorted labels.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Sorted normalized edges.
    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.vertices[0]
    }

    pub fn contains(&self, v: usize) -> bool {
        self.index.contains_key(&v)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[self.index[&v]].iter().map(|&i| self.vertices[i])
    }

    pub(crate) fn local(&self, v: usize) -> usize {
        self.index[&v]
    }

    pub(crate) fn label(&self, i: usize) -> usize {
        self.vertices[i]
    }

    pub(crate) fn local_adj(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub(crate) fn rooted(&self) -> Rooted {
        let n = self.len();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    depth[y] = depth[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        Rooted { order, parent, depth }
    }

    /// Edges of the unique path between two vertices, from `a` to `b`.
    pub fn path(&self, a: usize, b: usize) -> Vec<TreeEdge> {
        let (ia, ib) = (self.local(a), self.local(b));
        let mut pred = vec![usize::MAX; self.len()];
        pred[ia] = ia;
        let mut queue = VecDeque::from([ia]);
        while let Some(x) = queue.pop_front() {
            if x == ib {
                break;
            }
            for &y in &self.adj[x] {
                if pred[y] == usize::MAX {
                    pred[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut out = Vec::new();
        let mut x = ib;
        while x != ia {
            let p = pred[x];
            out.push(norm(self.vertices[p], self.vertices[x]));
            x = p;
        }
        out.reverse();
        out
    }

    /// Distances in edges from `v` to every vertex, by local index.
    pub(crate) fn distances(&self, v: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let start = self.local(v);
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Subtree induced by a connected vertex subset.
    pub fn induced(&self, keep: &[usize]) -> Result<Tree> {
        let inside: std::collections::HashSet<usize> = keep.iter().copied().collect();
        let edges: Vec<TreeEdge> = self
            .edges
            .iter()
            .copied()
            .filter(|(a, b)| inside.contains(a) && inside.contains(b))
            .collect();
        Tree::new(keep.to_vec(), &edges)
    }
}

/// Uniform random recursive tree on labels `0..n` after a random
/// relabelling: vertex `i` attaches to a uniformly chosen earlier vertex.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Tree {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let edges: Vec<(usize, usize)> = (1..n)
        .map(|i| (labels[i], labels[rng.gen_range(0..i)]))
        .collect();
    Tree::new((0..n).collect(), &edges).expect("random attachment yields a tree")
}
