//! Brute-force verifiers and explicit constructions used to check the
//! learner and the expressivity of composed trees.

mod expressivity;
mod optimal;

pub use crate::space::{ConfigSpace, EXHAUSTIVE_LIMIT};
pub use expressivity::{
    realize_arbitrary_permutation, single_feature_swap_tsp, snake_path, REALIZE_LIMIT,
};
pub use optimal::{brute_force_optimal_nll, OPTIMAL_ASSIGNMENT_LIMIT};
