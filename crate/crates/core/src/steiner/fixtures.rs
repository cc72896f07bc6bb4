//! Small reference instances.

use super::graph::{DemandStream, WeightedGraph};

/// Six unit-weight vertices `v1..v6` (ids `0..5`), every degree bound 3,
/// edges `v1v2, v1v4, v4v5, v2v3, v4v6` (ids `0..4`), demands `(v2, v5)`
/// then `(v3, v6)`. The optimal forest is the whole graph (weight 5), while
/// the best per-demand augmentations reuse `v4v5` and weigh 6 in total.
pub fn sample_graph() -> WeightedGraph {
    WeightedGraph::new(
        6,
        &[(0, 1, 1.0), (0, 3, 1.0), (3, 4, 1.0), (1, 2, 1.0), (3, 5, 1.0)],
        vec![3; 6],
    )
    .expect("valid fixture")
}

pub fn sample_demands(graph: &WeightedGraph) -> DemandStream {
    DemandStream::new(graph, &[(1, 4), (2, 5)]).expect("valid fixture")
}
