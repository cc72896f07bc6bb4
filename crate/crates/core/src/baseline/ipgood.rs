use super::{OfflineResult, Witness};
use crate::steiner::{ContractionState, Demand, EdgeId, WeightedGraph};
use crate::{Error, Result};

pub const IPGOOD_PRODUCT_CAP: u64 = 1_000_000;

/// Every minimal augmentation for a demand: the real edges of each simple
/// path through the contracted graph, or nothing when the endpoints are
/// already joined.
fn candidate_paths(graph: &WeightedGraph, contraction: &ContractionState, d: Demand) -> Vec<Vec<EdgeId>> {
    let (src, dst) = (contraction.component(d.s), contraction.component(d.t));
    if src == dst {
        return vec![Vec::new()];
    }
    let groups = contraction.groups();
    let mut out = Vec::new();
    let mut visited = vec![false; graph.n()];
    visited[src] = true;
    let mut path = Vec::new();
    fn walk(
        graph: &WeightedGraph,
        contraction: &ContractionState,
        groups: &[Vec<usize>],
        node: usize,
        dst: usize,
        visited: &mut [bool],
        path: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        if node == dst {
            let mut edges = path.clone();
            edges.sort_unstable();
            out.push(edges);
            return;
        }
        for &x in &groups[node] {
            for &(y, e) in graph.neighbors(x) {
                let next = contraction.component(y);
                if visited[next] {
                    continue;
                }
                visited[next] = true;
                path.push(e);
                walk(graph, contraction, groups, next, dst, visited, path, out);
                path.pop();
                visited[next] = false;
            }
        }
    }
    walk(graph, contraction, &groups, src, dst, &mut visited, &mut path, &mut out);
    out.sort();
    out.dedup();
    out
}

struct Search<'a> {
    graph: &'a WeightedGraph,
    w_opt: f64,
    candidates: Vec<Vec<Vec<EdgeId>>>,
    deg: Vec<u32>,
    weight: f64,
    chosen: Vec<usize>,
    best: Option<(f64, f64, Vec<usize>)>,
    nodes: u64,
}

impl Search<'_> {
    fn alpha(&self) -> f64 {
        self.deg
            .iter()
            .enumerate()
            .map(|(v, &d)| d as f64 / self.graph.bound(v) as f64)
            .fold(self.weight / self.w_opt, f64::max)
    }

    fn run(&mut self, i: usize) {
        self.nodes += 1;
        let alpha = self.alpha();
        if let Some((ba, bw, _)) = &self.best {
            if alpha > *ba || (alpha == *ba && self.weight >= *bw) {
                return;
            }
        }
        if i == self.candidates.len() {
            self.best = Some((alpha, self.weight, self.chosen.clone()));
            return;
        }
        for c in 0..self.candidates[i].len() {
            for &e in &self.candidates[i][c] {
                self.deg[self.graph.edge(e).u] += 1;
                self.deg[self.graph.edge(e).v] += 1;
                self.weight += self.graph.edge(e).w;
            }
            self.chosen.push(c);
            self.run(i + 1);
            self.chosen.pop();
            for &e in &self.candidates[i][c] {
                self.deg[self.graph.edge(e).u] -= 1;
                self.deg[self.graph.edge(e).v] -= 1;
                self.weight -= self.graph.edge(e).w;
            }
        }
    }
}

/// Optimal violation of the per-demand subgraph program for weight scale
/// `w_opt`: choose one augmentation per demand (real edges joining its
/// endpoints once earlier demands count as joined) minimizing the largest
/// of `sum_i deg_{H_i}(v) / b_v` and `sum_i w(H_i) / w_opt`. Ties go to the
/// lighter total weight.
pub fn offline_ipgood_opt(graph: &WeightedGraph, demands: &[Demand], w_opt: f64) -> Result<OfflineResult> {
    if !(w_opt.is_finite() && w_opt > 0.0) {
        return Err(Error::instance(format!("w_opt = {w_opt} must be positive")));
    }
    let mut contraction = ContractionState::new(graph.n());
    let mut candidates = Vec::with_capacity(demands.len());
    let mut product: u64 = 1;
    for &d in demands {
        let mut paths = candidate_paths(graph, &contraction, d);
        if paths.is_empty() {
            return Err(Error::Infeasible);
        }
        product = product.saturating_mul(paths.len() as u64);
        if product > IPGOOD_PRODUCT_CAP {
            return Err(Error::Capacity {
                what: "path combination space",
                size: product.min(usize::MAX as u64) as usize,
                cap: IPGOOD_PRODUCT_CAP as usize,
            });
        }
        // cheap candidates first so good incumbents appear early
        paths.sort_by(|a, b| {
            let key = |p: &Vec<EdgeId>| (graph.weight_of(p), p.len());
            key(a).partial_cmp(&key(b)).expect("finite weights").then(a.cmp(b))
        });
        candidates.push(paths);
        contraction.add(d);
    }
    let mut search = Search {
        graph,
        w_opt,
        candidates,
        deg: vec![0; graph.n()],
        weight: 0.0,
        chosen: Vec::new(),
        best: None,
        nodes: 0,
    };
    search.run(0);
    let (alpha, _, chosen) = search.best.ok_or(Error::Infeasible)?;
    let subgraphs: Vec<Vec<EdgeId>> = chosen
        .iter()
        .enumerate()
        .map(|(i, &c)| search.candidates[i][c].clone())
        .collect();
    Ok(OfflineResult {
        objective: alpha,
        witness: Witness::Subgraphs(subgraphs),
        nodes: search.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::offline_steiner_opt;
    use crate::steiner::fixtures::{sample_demands, sample_graph};
    use crate::steiner::DemandStream;

    #[test]
    fn sample_witness_weighs_six_and_loads_v4_four_times() {
        let g = sample_graph();
        let r = offline_ipgood_opt(&g, sample_demands(&g).as_slice(), 5.0).unwrap();
        let Witness::Subgraphs(hs) = &r.witness else { panic!() };
        let all: Vec<EdgeId> = hs.concat();
        assert_eq!(g.weight_of(&all), 6.0);
        assert_eq!(g.degrees_of(&all)[3], 4);
        assert_eq!(hs[0], vec![0, 1, 2]);
        assert_eq!(r.objective, 4.0 / 3.0);
    }

    #[test]
    fn single_demand_minimizes_over_paths() {
        // two routes 0-1-3 (weight 2) and 0-2-3 (weight 4), w_opt = 2
        let g = WeightedGraph::new(4, &[(0, 1, 1.0), (1, 3, 1.0), (0, 2, 2.0), (2, 3, 2.0)], vec![2; 4]).unwrap();
        let s = DemandStream::new(&g, &[(0, 3)]).unwrap();
        let r = offline_ipgood_opt(&g, s.as_slice(), 2.0).unwrap();
        assert_eq!(r.objective, 1.0);
        assert_eq!(r.witness, Witness::Subgraphs(vec![vec![0, 1]]));
    }

    #[test]
    fn never_below_one_at_the_forest_optimum() {
        use rand::Rng;
        let mut rng = crate::seed::rng(4);
        for _ in 0..30 {
            let n = 8;
            let mut edges = Vec::new();
            for v in 1..n {
                edges.push((rng.gen_range(0..v), v, rng.gen_range(1..4) as f64));
            }
            for _ in 0..3 {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if a != b && !edges.iter().any(|&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a)) {
                    edges.push((a, b, rng.gen_range(1..4) as f64));
                }
            }
            let g = WeightedGraph::new(n, &edges, (0..n).map(|_| rng.gen_range(1..4)).collect()).unwrap();
            let pairs: Vec<(usize, usize)> = (0..3)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .filter(|(a, b)| a != b)
                .collect();
            let s = DemandStream::new(&g, &pairs).unwrap();
            let Ok(opt) = offline_steiner_opt(&g, s.as_slice()) else { continue };
            let ip = offline_ipgood_opt(&g, s.as_slice(), opt.objective).unwrap();
            assert!(ip.objective >= 1.0 - 1e-12, "{}", ip.objective);
        }
    }
}
