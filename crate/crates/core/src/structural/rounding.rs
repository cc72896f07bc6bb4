use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::tree::{random_tree, Tree, TreeEdge};
use crate::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;

/// Probabilities over earlier vertices of an ordering of the tree: row `i`
/// distributes one unit among `order[0..i]`, and choosing `order[j]` loads
/// every edge of the tree path between `order[i]` and `order[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadAssignment {
    tree: Tree,
    order: Vec<usize>,
    /// `rows[i - 1]` holds `(j, p)` with `j < i` and `p > 0`, by `j`.
    rows: Vec<Vec<(usize, f64)>>,
}

impl LoadAssignment {
    pub fn new(tree: Tree, order: Vec<usize>, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != tree.vertices() {
            return Err(Error::instance("order is not a permutation of the tree vertices"));
        }
        if rows.len() + 1 != order.len() {
            return Err(Error::instance(format!(
                "expected {} rows, got {}",
                order.len().saturating_sub(1),
                rows.len()
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            let i = r + 1;
            let mut sum = 0.0;
            let mut last = None;
            for &(j, p) in row {
                if j >= i || last.is_some_and(|l| j <= l) {
                    return Err(Error::instance(format!("row {i} has entry {j} out of order or range")));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::instance(format!("row {i} has probability {p} outside [0, 1]")));
                }
                last = Some(j);
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::instance(format!("row {i} sums to {sum}, not 1")));
            }
        }
        Ok(Self { tree, order, rows })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Row `i` (1-based position in the order).
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i - 1]
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Expected load per edge.
    pub fn edge_loads(&self) -> BTreeMap<TreeEdge, f64> {
        let mut loads: BTreeMap<TreeEdge, f64> = self.tree.edges().iter().map(|&e| (e, 0.0)).collect();
        for (r, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                for e in self.tree.path(self.order[r + 1], self.order[j]) {
                    *loads.get_mut(&e).expect("tree edge") += p;
                }
            }
        }
        loads
    }

    pub fn max_load(&self) -> f64 {
        self.edge_loads().into_values().fold(0.0, f64::max)
    }
}

/// One chosen earlier position per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedAssignment {
    /// `choice[i - 1]` is the position chosen by row `i`.
    pub choice: Vec<usize>,
}

impl RoundedAssignment {
    pub fn edge_loads(&self, p: &LoadAssignment) -> BTreeMap<TreeEdge, usize> {
        let mut loads: BTreeMap<TreeEdge, usize> = p.tree().edges().iter().map(|&e| (e, 0)).collect();
        for (r, &j) in self.choice.iter().enumerate() {
            for e in p.tree().path(p.order()[r + 1], p.order()[j]) {
                *loads.get_mut(&e).expect("tree edge") += 1;
            }
        }
        loads
    }

    pub fn max_load(&self, p: &LoadAssignment) -> usize {
        self.edge_loads(p).into_values().max().unwrap_or(0)
    }
}

/// Inverse-CDF pick: the first entry whose prefix sum reaches `r`. Falls
/// back to the last entry when rounding leaves the total just below `r`.
pub fn select_index(row: &[(usize, f64)], r: f64) -> usize {
    let mut acc = 0.0;
    for &(j, p) in row {
        acc += p;
        if acc >= r && p > 0.0 {
            return j;
        }
    }
    row.iter().rev().find(|e| e.1 > 0.0).or(row.last()).expect("nonempty row").0
}

/// Rounds every row independently with one uniform draw in `[0, 1)` each.
pub fn round<R: Rng>(p: &LoadAssignment, rng: &mut R) -> RoundedAssignment {
    let choice = (1..=p.rows()).map(|i| select_index(p.row(i), rng.gen::<f64>())).collect();
    RoundedAssignment { choice }
}

/// Random assignment on a random `n`-vertex tree whose expected load stays
/// at most `max_load`. The order is a randomized breadth-first order, so
/// each vertex has its tree parent among the earlier ones; each row spreads
/// its unit over up to three nearest earlier vertices. Rows are retried
/// with fewer targets while the load is too high.
pub fn random_assignment<R: Rng>(n: usize, max_load: f64, rng: &mut R) -> LoadAssignment {
    let tree = random_tree(n, rng);
    let order = shuffled_bfs(&tree, rng);
    for width in (1..=3).rev() {
        let rows: Vec<Vec<(usize, f64)>> = (1..n)
            .map(|i| {
                let dist = tree.distances(order[i]);
                let mut earlier: Vec<(usize, usize)> =
                    (0..i).map(|j| (dist[tree.local(order[j])], j)).collect();
                earlier.sort_unstable();
                earlier.truncate(width);
                let raw: Vec<f64> = earlier.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                let mut row: Vec<(usize, f64)> =
                    earlier.iter().zip(&raw).map(|(&(_, j), &w)| (j, w / total)).collect();
                row.sort_unstable_by_key(|e| e.0);
                let head: f64 = row[..row.len() - 1].iter().map(|e| e.1).sum();
                row.last_mut().expect("nonempty").1 = 1.0 - head;
                row
            })
            .collect();
        let p = LoadAssignment::new(tree.clone(), order.clone(), rows).expect("rows are normalized");
        if width == 1 || p.max_load() <= max_load {
            return p;
        }
    }
    unreachable!("width 1 always returns")
}

fn shuffled_bfs<R: Rng>(tree: &Tree, rng: &mut R) -> Vec<usize> {
    let start = *tree.vertices().choose(rng).expect("nonempty tree");
    let mut seen = std::collections::BTreeSet::from([start]);
    let mut order = vec![start];
    let mut head = 0;
    while head < order.len() {
        let mut next: Vec<usize> = tree.neighbors(order[head]).filter(|v| !seen.contains(v)).collect();
        next.shuffle(rng);
        for v in next {
            seen.insert(v);
            order.push(v);
        }
        head += 1;
    }
    order
}

/// Summary of one rounding trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingTrial {
    pub trial: usize,
    pub seed: u64,
    pub max_load_p: f64,
    pub max_load_q: usize,
    /// `max_load_q / max(max_load_p, log2 n)`.
    pub ratio: f64,
}

impl RoundingTrial {
    /// Draws an assignment with load at most `log2 n` and rounds it.
    pub fn run(trial: usize, seed: u64, n: usize) -> Self {
        let mut rng = crate::seed::rng(seed);
        let log_n = (n as f64).log2();
        let p = random_assignment(n, log_n, &mut rng);
        let q = round(&p, &mut rng);
        let max_load_p = p.max_load();
        let max_load_q = q.max_load(&p);
        Self {
            trial,
            seed,
            max_load_p,
            max_load_q,
            ratio: max_load_q as f64 / max_load_p.max(log_n),
        }
    }
}
