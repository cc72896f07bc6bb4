//! The label-setting path search against exact enumeration, on states
//! produced by actually serving demands.

use proptest::prelude::*;
use rand::Rng;

use ompc::oracles::{path_delta, ExactPathOracle, PathQuery, PathSelector, SurrogatePathOracle};
use ompc::seed::rng;
use ompc::steiner::{Demand, SteinerEngine, WeightedGraph};
use ompc::PotentialParams;

fn random_graph(seed: u64) -> (WeightedGraph, Vec<Demand>) {
    let mut r = rng(seed);
    let n = r.gen_range(3..=10);
    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = r.gen_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, f64::from(r.gen_range(1..=4))));
    }
    for _ in 0..r.gen_range(0..=n) {
        let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
        if a < b && seen.insert((a, b)) {
            edges.push((a, b, f64::from(r.gen_range(1..=4))));
        }
    }
    let bounds = (0..n).map(|_| r.gen_range(1..=3)).collect();
    let graph = WeightedGraph::new(n, &edges, bounds).unwrap();
    let demands = (0..r.gen_range(1..=5))
        .map(|_| {
            let s = r.gen_range(0..n);
            Demand { s, t: (s + r.gen_range(1..n)) % n }
        })
        .collect();
    (graph, demands)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn surrogate_stays_within_factor_of_exact(seed in any::<u64>(), w_guess in 4.0f64..30.0) {
        let params = PotentialParams::default();
        let (graph, demands) = random_graph(seed);
        let mut engine = SteinerEngine::new(&graph, w_guess, ExactPathOracle::default(), params).unwrap();
        for d in demands {
            let q = PathQuery { graph: &graph, contraction: engine.contraction(), demand: d, w_guess };
            let exact = ExactPathOracle::default().select_path(&q, engine.state()).unwrap();
            let surrogate = SurrogatePathOracle.select_path(&q, engine.state()).unwrap();
            // Both searches see the same feasible region.
            prop_assert_eq!(exact.is_some(), surrogate.is_some());
            let (Some(exact), Some(surrogate)) = (exact, surrogate) else { break };
            let tau = |edges: &[usize]| engine.state().tau(&path_delta(&graph, edges, w_guess));
            let (te, ts) = (tau(&exact.edges), tau(&surrogate.edges));
            prop_assert!(te <= ts + 1e-12, "exact {} above surrogate {}", te, ts);
            prop_assert!(ts <= (params.rho() + 1.0) * te + 1e-12, "surrogate {} vs exact {}", ts, te);
            if engine.serve(d).is_err() {
                break;
            }
        }
    }
}
