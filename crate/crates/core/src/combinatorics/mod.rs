//! Brute-force ground truth for the tree expansion of the moments.
//!
//! Moments of the per-vertex measures expand into sums over plane trees,
//! which are in bijection with Dyck paths. This module enumerates both,
//! evaluates tree and forest values against a variance profile, implements
//! vertex splitting, and checks the run-length bounds, the Markov chain
//! describing uniform Dyck paths, and the stopped-walk generating function
//! by exhaustive enumeration.

use thiserror::Error;

mod dyck;
mod genfn;
mod markov;
mod runs;
mod suite;
mod tree;

pub use dyck::{catalan, enumerate_dyck, DyckPath, Step, MAX_ENUMERATION_K};
pub use genfn::{
    generating_function_pole, stopped_walk_brute_force, stopped_walk_generating_function,
    up_down_histograms, walk_expectation, RunHistogram, MAX_WALK_LEN,
};
pub use markov::{
    dyck_transition_prob, exact_transition_prob, exhaustive_transition_counts, pbot_exact,
    pbot_exhaustive, pbot_probability, PbotSummary, PbotValue, TransitionCount,
};
pub use runs::{run_statistics, RunStats};
pub use suite::{chopping_bound_check, run_oracle_suite, ChoppingReport, OracleReport, Violation};
pub use tree::{
    forest_val, naive_tree_val, path_to_tree, tree_to_path, tree_val, tree_val_all, PlaneTree, SplitMode,
    VertexId,
};

#[derive(Debug, Error, PartialEq)]
pub enum CombinatoricsError {
    #[error("{what} = {value} exceeds the enumeration limit {limit}")]
    SizeGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("cannot parse bracket string: {0}")]
    Parse(String),
    #[error("vertex {vertex} cannot be split: {reason}")]
    InvalidVertex { vertex: usize, reason: &'static str },
    #[error("expected a single tree, found {0} components")]
    NotATree(usize),
    #[error("outside the domain: {0}")]
    Domain(String),
}
