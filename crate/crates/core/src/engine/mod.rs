//! Generic evolutionary search engine: random search, single-objective GA
//! and two-objective NSGA-II over an abstract test problem.
//!
//! Objectives are minimized internally. Fitness (fault revealing power)
//! and novelty are maximized quantities, so they are negated when entering
//! an [`ObjectiveVector`].

mod search;
mod sort;

pub use search::{n_nds, run_ga, run_nsga2, run_random, RunStats};
pub use sort::{binary_tournament_select, crowding_distance, non_dominated_sort, TournamentKey};

/// The three supported search algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Random,
    Ga,
    Nsga2,
}

impl Algo {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algo::Random => "random",
            Algo::Ga => "ga",
            Algo::Nsga2 => "nsga2",
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Algo::Random),
            "ga" => Ok(Algo::Ga),
            "nsga2" => Ok(Algo::Nsga2),
            other => Err(format!("unknown algorithm `{other}` (expected random, ga or nsga2)")),
        }
    }
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dispatches to the matching search loop.
pub fn run_search(
    problem: &dyn Problem,
    algo: Algo,
    config: &SearchConfig,
    log: bool,
) -> Result<(Vec<Individual>, RunStats), ConfigError> {
    match algo {
        Algo::Random => run_random(problem, config, log),
        Algo::Ga => run_ga(problem, config, log),
        Algo::Nsga2 => run_nsga2(problem, config, log),
    }
}

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genome::{self, GeneSpec, Scenario};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("pop_size must be > 1, got {0}")]
    PopSize(usize),
    #[error("n_gen must be >= 1, got {0}")]
    Generations(usize),
    #[error("{name} must be in [0, 1], got {value}")]
    Rate { name: &'static str, value: f64 },
    #[error("test_suite_size must be in [1, pop_size], got {0}")]
    SuiteSize(usize),
}

/// Minimized objective values of an evaluated individual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub values: Vec<f64>,
}

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        ObjectiveVector { values }
    }

    /// Pareto dominance under minimization: no worse in all objectives and
    /// strictly better in at least one.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        debug_assert_eq!(self.values.len(), other.values.len());
        let mut strictly_better = false;
        for (a, b) in self.values.iter().zip(&other.values) {
            if a > b {
                return false;
            }
            if a < b {
                strictly_better = true;
            }
        }
        strictly_better
    }
}

/// One candidate solution together with its evaluation results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Individual {
    pub scenario: Scenario,
    pub objectives: ObjectiveVector,
    /// Constraint violation; 0 iff feasible.
    pub constraint_violation: f64,
    /// Cumulative evaluation count at the time this individual was evaluated.
    pub evaluation_index: u64,
}

impl Individual {
    pub fn is_feasible(&self) -> bool {
        self.constraint_violation == 0.0
    }

    /// Raw (maximized) fault revealing power.
    pub fn fitness(&self) -> f64 {
        -self.objectives.values[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub pop_size: usize,
    pub n_gen: usize,
    pub mut_rate: f64,
    pub cross_rate: f64,
    pub test_suite_size: usize,
    pub seed: u64,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop_size <= 1 {
            return Err(ConfigError::PopSize(self.pop_size));
        }
        if self.n_gen == 0 {
            return Err(ConfigError::Generations(self.n_gen));
        }
        for (name, value) in [("mut_rate", self.mut_rate), ("cross_rate", self.cross_rate)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Rate { name, value });
            }
        }
        if self.test_suite_size == 0 || self.test_suite_size > self.pop_size {
            return Err(ConfigError::SuiteSize(self.test_suite_size));
        }
        Ok(())
    }
}

/// Result of evaluating one scenario against the system model.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    /// Raw fault revealing power (maximized). 0 for infeasible scenarios.
    pub fitness: f64,
    /// Constraint violation; 0 iff feasible.
    pub constraint_violation: f64,
    /// Set when the model hit its step cap before finishing.
    pub truncated: bool,
}

/// Contract a test problem implements to be searchable by the engine.
///
/// Evaluation must be deterministic for a fixed scenario; the simplified
/// system models contain no randomness.
pub trait Problem {
    fn gene_specs(&self) -> &[GeneSpec];

    /// Allowed scenario column counts, inclusive.
    fn length_bounds(&self) -> (usize, usize);

    /// Raw fault revealing power of a scenario (maximized).
    fn evaluate_fitness(&self, s: &Scenario) -> f64;

    /// Constraint violation; 0 iff the scenario is a valid test case.
    fn validate(&self, s: &Scenario) -> f64;

    /// Dissimilarity of two scenarios in [0, 1]; symmetric, 0 on identity.
    fn novelty(&self, a: &Scenario, b: &Scenario) -> f64;

    /// Combined evaluation. Problems override this to share decoding work
    /// between validation and fitness.
    fn evaluate(&self, s: &Scenario) -> Evaluation {
        let cv = self.validate(s);
        let fitness = if cv == 0.0 { self.evaluate_fitness(s) } else { 0.0 };
        Evaluation {
            fitness,
            constraint_violation: cv,
            truncated: false,
        }
    }

    fn sample(&self, rng: &mut dyn rand::RngCore) -> Scenario {
        genome::sample(self.gene_specs(), self.length_bounds(), rng)
            .expect("problem gene specs must be valid")
    }

    fn crossover(
        &self,
        a: &Scenario,
        b: &Scenario,
        rng: &mut dyn rand::RngCore,
    ) -> (Scenario, Scenario) {
        genome::one_point_crossover(a, b, rng)
    }

    /// One of the two mutation operators, chosen with equal probability.
    fn mutate(&self, s: &Scenario, rng: &mut dyn rand::RngCore) -> Scenario {
        if rng.random_bool(0.5) {
            genome::mutate_exchange(s, rng)
        } else {
            genome::mutate_change_variable(s, self.gene_specs(), rng)
        }
    }
}
