//! Budgeted influence maximization on two-layer socio-physical networks.
//!
//! A social digraph evolves under the deterministic linear threshold model, with
//! the extra rule that a social node can only become active while at least one
//! physical node covering it is open. Given a seed budget `k_s` and an open budget
//! `k_p`, the solvers in this crate pick seeds and physical nodes to maximize the
//! total weight of social nodes that eventually activate:
//!
//! * [`approx`] — greedy seed selection plus the three-case opening rule, with the
//!   weight-ratio approximation bounds.
//! * [`tree_dp`] — exact budget-splitting dynamic program for forests of out-trees.
//! * [`oracle`] — exhaustive enumeration, the ground truth for everything else.
//!
//! [`cascade`] evaluates any seed/open choice, [`generate`] builds seeded random
//! instances and [`bench`] compares the oracle with the approximation.

pub mod approx;
pub mod bench;
pub mod cascade;
pub mod error;
pub mod generate;
pub mod io;
pub mod model;
pub mod network;
pub mod oracle;
pub mod tree_dp;

pub use approx::{
    classify_case, greedy_seeds, ratio_bound, solve_approx, ApproxOutcome, CaseTag, GreedyTrace,
    RatioBound,
};
pub use cascade::{evaluate_solution, reachable_set, sigma, sigma_w, simulate_cascade, CascadeResult};
pub use error::{Error, Result};
pub use model::{
    check_assumptions, validate_instance, AlgorithmTag, Assumption, AssumptionProfile,
    BipartiteProfile, Budgets, Instance, PhysicalNode, SocialGraph, SocialNode, Solution,
    ValidationReport, Violation,
};
pub use network::Network;
pub use oracle::{brute_force_solve, k_subsets, OracleOptions, OracleResult};
pub use tree_dp::{
    binarize_tree, dp_extract, dp_tables, link_forest, solve_forest, solve_forest_full_open,
    solve_forest_uniform, BinarizedForest, DpTable, ForestOutcome, OutTree,
};
