use super::tree::Tree;
use crate::{Error, Result};

/// Two edge-disjoint subtrees sharing exactly one vertex and covering every
/// edge of the original tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSplit {
    pub shared: usize,
    pub first: Tree,
    pub second: Tree,
}

impl TreeSplit {
    /// Size cap `ceil(2n/3) + 1` on either side.
    pub fn size_cap(n: usize) -> usize {
        (2 * n).div_ceil(3) + 1
    }

    /// Every property a split of `tree` must have, as a list of problems.
    pub fn violations(&self, tree: &Tree) -> Vec<String> {
        let mut out = Vec::new();
        let shared: Vec<usize> = self
            .first
            .vertices()
            .iter()
            .copied()
            .filter(|&v| self.second.contains(v))
            .collect();
        if shared != [self.shared] {
            out.push(format!("sides share {shared:?}, expected [{}]", self.shared));
        }
        let mut edges: Vec<_> = self.first.edges().iter().chain(self.second.edges()).copied().collect();
        edges.sort_unstable();
        let total = edges.len();
        edges.dedup();
        if edges.len() != total {
            out.push("sides share an edge".into());
        }
        if edges != tree.edges() {
            out.push("edge sets do not cover the tree".into());
        }
        let cap = Self::size_cap(tree.len());
        for (name, side) in [("first", &self.first), ("second", &self.second)] {
            if side.len() > cap {
                out.push(format!("{name} side has {} vertices, above {cap}", side.len()));
            }
        }
        out
    }
}

/// Splits a tree at a deep vertex of large subtree.
///
/// With `t = ceil(n/3)`, take the deepest vertex whose subtree has at least
/// `t` vertices (smallest label on ties). Removing it leaves its child
/// subtrees and, unless it is the root, the part above it. Those pieces are
/// gathered largest first (smallest representative label on ties) until
/// they hold at least `t` vertices; the first side is the split vertex plus
/// the gathered pieces, the second side is the split vertex plus the rest.
pub fn split_tree(tree: &Tree) -> Result<TreeSplit> {
    let n = tree.len();
    if n < 3 {
        return Err(Error::TreeTooSmall { vertices: n });
    }
    let threshold = n.div_ceil(3);
    let rooted = tree.rooted();
    let mut size = vec![1usize; n];
    for &x in rooted.order.iter().rev() {
        if let Some(p) = rooted.parent[x] {
            size[p] += size[x];
        }
    }
    let pivot = (0..n)
        .filter(|&x| size[x] >= threshold)
        .max_by(|&a, &b| rooted.depth[a].cmp(&rooted.depth[b]).then(b.cmp(&a)))
        .expect("the root qualifies");

    // (size, representative label, whether it is the part above the pivot)
    let mut pieces: Vec<(usize, usize, Option<usize>)> = tree
        .local_adj(pivot)
        .iter()
        .filter(|&&c| rooted.parent[c] == Some(pivot))
        .map(|&c| (size[c], tree.label(c), Some(c)))
        .collect();
    if let Some(p) = rooted.parent[pivot] {
        pieces.push((n - size[pivot], tree.label(p), None));
    }
    pieces.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut gathered = vec![false; n];
    let mut count = 0;
    for &(sz, _, child) in &pieces {
        if count >= threshold {
            break;
        }
        count += sz;
        match child {
            Some(c) => mark_below(tree, &rooted.parent, c, &mut gathered),
            None => {
                let mut inside_pivot = vec![false; n];
                mark_below(tree, &rooted.parent, pivot, &mut inside_pivot);
                for x in 0..n {
                    gathered[x] |= !inside_pivot[x];
                }
            }
        }
    }

    let pivot_label = tree.label(pivot);
    let mut first = vec![pivot_label];
    let mut second = Vec::new();
    for x in 0..n {
        if gathered[x] {
            first.push(tree.label(x));
        } else {
            second.push(tree.label(x));
        }
    }
    Ok(TreeSplit {
        shared: pivot_label,
        first: tree.induced(&first)?,
        second: tree.induced(&second)?,
    })
}

/// Marks the subtree hanging below local vertex `top`.
fn mark_below(tree: &Tree, parent: &[Option<usize>], top: usize, mark: &mut [bool]) {
    let mut stack = vec![top];
    while let Some(x) = stack.pop() {
        mark[x] = true;
        for &y in tree.local_adj(x) {
            if parent[y] == Some(x) {
                stack.push(y);
            }
        }
    }
}
