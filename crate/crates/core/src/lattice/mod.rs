//! Schema-driven search state: lattice levels with pruning, and the FD
//! prefix tree used to manage candidates.

mod fdtree;
mod level;

pub use fdtree::FdTree;
pub use level::{
    compute_dependencies, first_level, generate_next, search_local, Evaluator, LatticeLevel,
    LocalEvaluator, NodeInfo, OrderTest, PruneState,
};
