//! Tree constructions: splitting a tree into two edge-disjoint
//! subtrees of bounded size, building connective lists of subgraphs for a
//! demand sequence over a forest, and randomized rounding of pair
//! probabilities over tree paths.

mod connective;
mod rounding;
mod split;
mod tree;

pub use connective::{
    build_connective, multiplicity_bound, recursive_connective, verify_connective, ConnectiveList,
    ConnectiveReport, CUT_CHECK_MAX_VERTICES,
};
pub use rounding::{
    random_assignment, round, select_index, LoadAssignment, RoundedAssignment, RoundingTrial,
};
pub use split::{split_tree, TreeSplit};
pub use tree::{random_tree, Tree, TreeEdge};
