//! Search-based generation of test scenarios for autonomous systems.
//!
//! Scenarios are fixed-size matrices of genes evolved by one of three
//! search algorithms (random search, a single-objective GA, two-objective
//! NSGA-II). Two concrete problems are included: a lane keeping assist
//! system driving generated roads and a mobile robot planning through
//! generated obstacle grids.

pub mod config;
pub mod engine;
pub mod experiment;
pub mod genome;
pub mod lkas;
pub mod report;
pub mod robot;

pub use config::{load_config, Config};
pub use engine::{run_search, Algo, Individual, Problem, SearchConfig};
pub use experiment::{run_experiment, ExperimentOptions, ProblemKind};
pub use genome::{GeneSpec, Scenario};
pub use report::{compare, get_test_suite, suite_novelty, TestSuite};
