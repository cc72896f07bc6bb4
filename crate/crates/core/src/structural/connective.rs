use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::split::split_tree;
use super::tree::{norm, Tree, TreeEdge};
use crate::unionfind::UnionFind;
use crate::{Error, Result};

/// One subgraph of the forest per demand, edges sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectiveList {
    pub subgraphs: Vec<Vec<TreeEdge>>,
    /// Demands whose subgraph needed the repair pass.
    pub repaired: Vec<usize>,
}

impl ConnectiveList {
    /// How many subgraphs use each edge.
    pub fn multiplicities(&self) -> BTreeMap<TreeEdge, usize> {
        let mut count = BTreeMap::new();
        for q in &self.subgraphs {
            for &e in q {
                *count.entry(e).or_insert(0) += 1;
            }
        }
        count
    }
}

/// `3 log2 |V(F)|`.
pub fn multiplicity_bound(vertices: usize) -> f64 {
    3.0 * (vertices as f64).log2()
}

fn components(n: usize, forest: &[(usize, usize)]) -> Result<(UnionFind, Vec<Tree>)> {
    let mut uf = UnionFind::new(n);
    for &(a, b) in forest {
        if a >= n || b >= n {
            return Err(Error::instance(format!("forest edge ({a}, {b}) out of range")));
        }
        if !uf.union(a, b) {
            return Err(Error::instance(format!("forest edge ({a}, {b}) closes a cycle")));
        }
    }
    let mut members: BTreeMap<usize, (Vec<usize>, Vec<(usize, usize)>)> = BTreeMap::new();
    for v in 0..n {
        members.entry(uf.find(v)).or_default().0.push(v);
    }
    for &(a, b) in forest {
        members.get_mut(&uf.find(a)).expect("root exists").1.push((a, b));
    }
    let trees = members
        .into_values()
        .map(|(vs, es)| Tree::new(vs, &es))
        .collect::<Result<Vec<_>>>()?;
    Ok((uf, trees))
}

/// Builds a connective list for demands over a forest on vertices `0..n`.
///
/// Each tree of the forest is handled on its own. A tree with at most four
/// vertices answers a pair with its tree path, or with nothing when earlier
/// pairs already join its endpoints. A larger tree is split in two; pairs
/// inside one side are passed down to that side. Among the pairs crossing
/// the split, the first one gets its whole tree path, and every later one
/// is replaced by two pairs joining its endpoints to the first crossing
/// pair's endpoints on the same side, and gets the union of their answers.
pub fn recursive_connective(n: usize, forest: &[(usize, usize)], demands: &[(usize, usize)]) -> Result<ConnectiveList> {
    let (mut uf, trees) = components(n, forest)?;
    let mut by_tree: Vec<Vec<usize>> = vec![Vec::new(); trees.len()];
    let tree_of: BTreeMap<usize, usize> = trees
        .iter()
        .enumerate()
        .map(|(i, t)| (uf.find(t.root()), i))
        .collect();
    for (i, &(s, t)) in demands.iter().enumerate() {
        if s >= n || t >= n {
            return Err(Error::instance(format!("demand {i} ({s}, {t}) out of range")));
        }
        if !uf.connected(s, t) {
            return Err(Error::instance(format!("demand {i} ({s}, {t}) is not connected by the forest")));
        }
        by_tree[tree_of[&uf.find(s)]].push(i);
    }
    let mut subgraphs = vec![Vec::new(); demands.len()];
    for (tree, idx) in trees.iter().zip(by_tree) {
        let pairs: Vec<(usize, usize)> = idx.iter().map(|&i| demands[i]).collect();
        for (i, q) in idx.into_iter().zip(build_in_tree(tree, &pairs)?) {
            subgraphs[i] = q.into_iter().collect();
        }
    }
    Ok(ConnectiveList {
        subgraphs,
        repaired: Vec::new(),
    })
}

/// [`recursive_connective`] followed by a repair pass: the recursion may
/// leave a demand whose endpoints are joined only through pairs it invented
/// itself, not through earlier demands. Such a `Q_i` gets the fewest extra
/// forest edges that join its endpoints once `Q_i` and the earlier demands
/// are contracted. The repaired demands are listed in the result.
pub fn build_connective(n: usize, forest: &[(usize, usize)], demands: &[(usize, usize)]) -> Result<ConnectiveList> {
    let mut list = recursive_connective(n, forest, demands)?;
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in forest {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut earlier = UnionFind::new(n);
    for (i, &(s, t)) in demands.iter().enumerate() {
        let mut uf = earlier.clone();
        for &(a, b) in &list.subgraphs[i] {
            uf.union(a, b);
        }
        if !uf.connected(s, t) {
            let extra = cheapest_bridge(&adj, &mut uf, s, t);
            let q = &mut list.subgraphs[i];
            q.extend(extra);
            q.sort_unstable();
            q.dedup();
            list.repaired.push(i);
        }
        earlier.union(s, t);
    }
    Ok(list)
}

/// Forest edges on a path from `s` to `t` with the fewest edges outside the
/// components of `uf`, by 0-1 BFS over the forest plus free moves inside a
/// component.
fn cheapest_bridge(adj: &[Vec<usize>], uf: &mut UnionFind, s: usize, t: usize) -> Vec<TreeEdge> {
    let n = adj.len();
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        members.entry(uf.find(v)).or_default().push(v);
    }
    let mut dist = vec![usize::MAX; n];
    let mut pred: Vec<Option<(usize, bool)>> = vec![None; n];
    let mut deque = std::collections::VecDeque::from([s]);
    dist[s] = 0;
    while let Some(x) = deque.pop_front() {
        for &y in &members[&uf.find(x)] {
            if dist[x] < dist[y] {
                dist[y] = dist[x];
                pred[y] = Some((x, false));
                deque.push_front(y);
            }
        }
        for &y in &adj[x] {
            let cost = usize::from(!uf.connected(x, y));
            if dist[x] + cost < dist[y] {
                dist[y] = dist[x] + cost;
                pred[y] = Some((x, true));
                if cost == 0 {
                    deque.push_front(y);
                } else {
                    deque.push_back(y);
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut x = t;
    while let Some((p, real)) = pred[x] {
        if real && !uf.connected(p, x) {
            out.push(norm(p, x));
        }
        x = p;
    }
    out
}

enum Origin {
    First(usize),
    Second(usize),
    Full(Vec<TreeEdge>),
    Derived(usize, usize),
}

fn build_in_tree(tree: &Tree, pairs: &[(usize, usize)]) -> Result<Vec<BTreeSet<TreeEdge>>> {
    if tree.len() <= 4 {
        let mut uf: BTreeMap<usize, usize> = tree.vertices().iter().map(|&v| (v, v)).collect();
        fn find(uf: &mut BTreeMap<usize, usize>, mut x: usize) -> usize {
            while uf[&x] != x {
                let up = uf[&uf[&x]];
                uf.insert(x, up);
                x = up;
            }
            x
        }
        return Ok(pairs
            .iter()
            .map(|&(s, t)| {
                let (rs, rt) = (find(&mut uf, s), find(&mut uf, t));
                if rs == rt {
                    BTreeSet::new()
                } else {
                    uf.insert(rs, rt);
                    tree.path(s, t).into_iter().collect()
                }
            })
            .collect());
    }

    let split = split_tree(tree)?;
    let (first, second) = (&split.first, &split.second);
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    let mut anchor: Option<(usize, usize)> = None;
    let mut origins = Vec::with_capacity(pairs.len());
    for &(s, t) in pairs {
        let origin = if first.contains(s) && first.contains(t) {
            l1.push((s, t));
            Origin::First(l1.len() - 1)
        } else if second.contains(s) && second.contains(t) {
            l2.push((s, t));
            Origin::Second(l2.len() - 1)
        } else {
            let (a, b) = if first.contains(s) { (s, t) } else { (t, s) };
            match anchor {
                None => {
                    anchor = Some((a, b));
                    Origin::Full(tree.path(a, b))
                }
                Some((xa, xb)) => {
                    l1.push((a, xa));
                    l2.push((b, xb));
                    Origin::Derived(l1.len() - 1, l2.len() - 1)
                }
            }
        };
        origins.push(origin);
    }
    let q1 = build_in_tree(first, &l1)?;
    let q2 = build_in_tree(second, &l2)?;
    Ok(origins
        .into_iter()
        .map(|o| match o {
            Origin::First(i) => q1[i].clone(),
            Origin::Second(i) => q2[i].clone(),
            Origin::Full(path) => path.into_iter().collect(),
            Origin::Derived(i, j) => q1[i].union(&q2[j]).copied().collect(),
        })
        .collect())
}

/// Outcome of checking a connective list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectiveReport {
    /// First demand whose subgraph uses an edge outside the forest.
    pub foreign_edge: Option<(usize, TreeEdge)>,
    /// First demand whose endpoints the prefix union fails to connect.
    pub prefix_failure: Option<usize>,
    pub max_multiplicity: usize,
    pub bound: f64,
    /// Most used edge when it exceeds the bound.
    pub offending_edge: Option<(TreeEdge, usize)>,
    /// Whether the cut condition was checked by enumerating vertex subsets.
    pub cut_checked: bool,
    /// First demand with a separating cut that avoids its subgraph and
    /// keeps every earlier pair together.
    pub cut_failure: Option<usize>,
}

impl ConnectiveReport {
    pub fn passed(&self) -> bool {
        self.foreign_edge.is_none()
            && self.prefix_failure.is_none()
            && self.offending_edge.is_none()
            && self.cut_failure.is_none()
    }
}

/// Largest forest on which the cut condition is checked by enumeration.
pub const CUT_CHECK_MAX_VERTICES: usize = 12;

/// Checks a list against the forest and demands: every subgraph lies in
/// the forest, the union of the first `i` subgraphs connects pair `i`, no
/// edge is used more than `3 log2 n` times and, for `n <= 12`, no cut both
/// avoids `Q_i` and separates pair `i` while keeping earlier pairs whole.
pub fn verify_connective(
    n: usize,
    forest: &[(usize, usize)],
    demands: &[(usize, usize)],
    list: &ConnectiveList,
) -> ConnectiveReport {
    let in_forest: BTreeSet<TreeEdge> = forest.iter().map(|&(a, b)| norm(a, b)).collect();
    let foreign_edge = list.subgraphs.iter().enumerate().find_map(|(i, q)| {
        q.iter().find(|e| !in_forest.contains(e)).map(|&e| (i, e))
    });

    let mut prefix_failure = None;
    let mut uf = UnionFind::new(n);
    for (i, (q, &(s, t))) in list.subgraphs.iter().zip(demands).enumerate() {
        for &(a, b) in q {
            if a < n && b < n {
                uf.union(a, b);
            }
        }
        if !uf.connected(s, t) {
            prefix_failure = Some(i);
            break;
        }
    }
    if list.subgraphs.len() != demands.len() && prefix_failure.is_none() {
        prefix_failure = Some(list.subgraphs.len().min(demands.len()));
    }

    let bound = multiplicity_bound(n);
    let mult = list.multiplicities();
    let worst = mult.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)));
    let max_multiplicity = worst.map_or(0, |(_, &c)| c);
    let offending_edge = worst.filter(|(_, &c)| c as f64 > bound).map(|(&e, &c)| (e, c));

    let cut_checked = n <= CUT_CHECK_MAX_VERTICES;
    let cut_failure = if cut_checked {
        (0..demands.len().min(list.subgraphs.len()))
            .find(|&i| separating_cut(n, demands, &list.subgraphs[i], i).is_some())
    } else {
        None
    };
    ConnectiveReport {
        foreign_edge,
        prefix_failure,
        max_multiplicity,
        bound,
        offending_edge,
        cut_checked,
        cut_failure,
    }
}

/// A vertex set containing `s_i` but not `t_i` that no edge of `q` leaves
/// and that no earlier pair straddles.
fn separating_cut(n: usize, demands: &[(usize, usize)], q: &[TreeEdge], i: usize) -> Option<u32> {
    let (s, t) = demands[i];
    if s == t {
        return None;
    }
    let side = |mask: u32, v: usize| mask >> v & 1 == 1;
    (0u32..1 << n).find(|&mask| {
        side(mask, s)
            && !side(mask, t)
            && q.iter().all(|&(a, b)| side(mask, a) == side(mask, b))
            && demands[..i].iter().all(|&(a, b)| side(mask, a) == side(mask, b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structural::random_tree;
    use rand::Rng;

    fn path_graph(n: usize) -> Vec<(usize, usize)> {
        (1..n).map(|i| (i - 1, i)).collect()
    }

    #[test]
    fn single_demand_gets_its_path() {
        let forest = path_graph(8);
        let list = build_connective(8, &forest, &[(1, 6)]).unwrap();
        assert_eq!(list.subgraphs[0], vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]);
        let report = verify_connective(8, &forest, &[(1, 6)], &list);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.max_multiplicity, 1);
    }

    #[test]
    fn pairs_inside_one_side_are_passed_down() {
        // six-vertex path 0..5 splits at vertex 2: first side {0,1,2}? check
        let forest = path_graph(6);
        let tree = Tree::new((0..6).collect(), &forest).unwrap();
        let split = split_tree(&tree).unwrap();
        let side = split.second.vertices().to_vec();
        let demands = [(side[0], side[side.len() - 1]), (side[1], side[side.len() - 1])];
        let list = build_connective(6, &forest, &demands).unwrap();
        let direct = build_in_tree(&split.second, &demands).unwrap();
        for (q, d) in list.subgraphs.iter().zip(direct) {
            assert_eq!(q, &d.into_iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn later_crossing_pair_joins_the_first_one() {
        let forest = path_graph(9);
        let tree = Tree::new((0..9).collect(), &forest).unwrap();
        let split = split_tree(&tree).unwrap();
        let a: Vec<usize> = split.first.vertices().iter().copied().filter(|&v| v != split.shared).collect();
        let b: Vec<usize> = split.second.vertices().iter().copied().filter(|&v| v != split.shared).collect();
        let demands = [(a[0], b[0]), (a[1], b[1])];
        let list = build_connective(9, &forest, &demands).unwrap();
        let mut expected: BTreeSet<TreeEdge> = build_in_tree(&split.first, &[(a[1], a[0])]).unwrap().remove(0);
        expected.extend(build_in_tree(&split.second, &[(b[1], b[0])]).unwrap().remove(0));
        assert_eq!(list.subgraphs[1], expected.into_iter().collect::<Vec<_>>());
        assert!(verify_connective(9, &forest, &demands, &list).passed());
    }

    #[test]
    fn empty_subgraph_for_new_pair_fails() {
        let forest = path_graph(5);
        let demands = [(0, 4)];
        let list = ConnectiveList {
            subgraphs: vec![vec![]],
            repaired: vec![],
        };
        let report = verify_connective(5, &forest, &demands, &list);
        assert_eq!(report.prefix_failure, Some(0));
        assert_eq!(report.cut_failure, Some(0));
        assert!(!report.passed());
    }

    #[test]
    fn overused_edge_is_reported() {
        let forest = vec![(0, 1)];
        let demands = vec![(0, 1); 4];
        let list = ConnectiveList {
            subgraphs: vec![vec![(0, 1)]; 4],
            repaired: vec![],
        };
        let report = verify_connective(2, &forest, &demands, &list);
        assert_eq!(report.offending_edge, Some(((0, 1), 4)));
        assert!(!report.passed());
    }

    #[test]
    fn disconnected_demand_is_rejected() {
        let forest = vec![(0, 1), (2, 3)];
        assert!(build_connective(4, &forest, &[(0, 3)]).is_err());
        assert!(build_connective(3, &[(0, 1), (1, 2), (2, 0)], &[]).is_err());
    }

    #[test]
    fn random_instances_pass() {
        let mut rng = crate::seed::rng(5);
        for _ in 0..200 {
            let n = rng.gen_range(2..=40);
            let tree = random_tree(n, &mut rng);
            let demands: Vec<(usize, usize)> = (0..rng.gen_range(1..=20))
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect();
            let list = build_connective(n, tree.edges(), &demands).unwrap();
            let report = verify_connective(n, tree.edges(), &demands, &list);
            assert!(report.passed(), "n = {n}: {report:?}");
        }
    }

    /// Star on 0 with leaves 1..4 splits into {0,1,2} and {0,3,4}. The
    /// third demand is answered in the second half through the invented
    /// pair (3, 4) and gets nothing, yet no earlier demand joins 3 and 1.
    #[test]
    fn recursion_alone_can_miss_the_cut_condition() {
        let forest = [(0, 1), (0, 2), (0, 3), (0, 4)];
        let demands = [(4, 1), (3, 2), (3, 1)];
        let bare = recursive_connective(5, &forest, &demands).unwrap();
        assert!(bare.subgraphs[2].is_empty());
        let report = verify_connective(5, &forest, &demands, &bare);
        assert_eq!(report.prefix_failure, None);
        assert_eq!(report.cut_failure, Some(2));

        let fixed = build_connective(5, &forest, &demands).unwrap();
        assert_eq!(fixed.repaired, vec![2]);
        // two edges through the centre, from the {3, 2} side to the {4, 1} side
        assert_eq!(fixed.subgraphs[2].len(), 2);
        assert!(verify_connective(5, &forest, &demands, &fixed).passed());
    }

    #[test]
    fn repair_statistics() {
        let mut rng = crate::seed::rng(1);
        let (mut repaired, mut worst) = (0, 0.0f64);
        for _ in 0..300 {
            let n = rng.gen_range(3..=64);
            let tree = random_tree(n, &mut rng);
            let demands: Vec<(usize, usize)> = (0..rng.gen_range(1..=20))
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect();
            let list = build_connective(n, tree.edges(), &demands).unwrap();
            let report = verify_connective(n, tree.edges(), &demands, &list);
            assert!(report.passed(), "{report:?}");
            repaired += list.repaired.len();
            worst = worst.max(report.max_multiplicity as f64 / report.bound);
        }
        assert!(repaired > 0);
        assert!(worst <= 1.0);
    }
}
