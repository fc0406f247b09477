//! Post-processing: test-suite extraction, run persistence, scenario
//! rendering and cross-algorithm comparison.

pub mod compare;
pub mod svg;

pub use compare::{compare, ComparisonPaths};

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    crowding_distance, non_dominated_sort, Algo, Individual, Problem, RunStats,
};
use crate::genome::{Scenario, ScenarioDocument};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write to {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid stats file {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("stats directory {0} contains no stats_run_*.json files")]
    EmptyStatsDir(PathBuf),
    #[error("{dirs} stats directories but {names} names")]
    NameCountMismatch { dirs: usize, names: usize },
    #[error("need at least 2 stats directories to compare, got {0}")]
    TooFewDirs(usize),
}

/// Problems that can draw one of their scenarios as a standalone SVG.
pub trait RenderScenario: Problem {
    fn render_svg(&self, s: &Scenario) -> String;
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub scenario: Scenario,
    pub fitness: f64,
    /// Mean novelty of this scenario against the rest of the suite.
    pub mean_novelty: f64,
}

/// The `T` best scenarios extracted from a finished run, sorted by
/// descending fitness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestSuite {
    pub entries: Vec<SuiteEntry>,
    /// Set when fewer than `T` feasible solutions were available.
    pub short: bool,
}

/// Extracts the test suite from a final population. GA and random search
/// take the top `T` feasible individuals by fitness; NSGA-II fills from
/// successive Pareto fronts, breaking the last partial front by crowding
/// distance. Ties are broken by evaluation order.
pub fn get_test_suite(population: &[Individual], size: usize, algo: Algo) -> TestSuite {
    let feasible: Vec<usize> =
        (0..population.len()).filter(|&i| population[i].is_feasible()).collect();
    let mut chosen: Vec<usize> = match algo {
        Algo::Random | Algo::Ga => {
            let mut order = feasible;
            order.sort_by(|&a, &b| {
                population[b]
                    .fitness()
                    .partial_cmp(&population[a].fitness())
                    .unwrap()
                    .then(population[a].evaluation_index.cmp(&population[b].evaluation_index))
            });
            order.truncate(size);
            order
        }
        Algo::Nsga2 => {
            let subset: Vec<Individual> =
                feasible.iter().map(|&i| population[i].clone()).collect();
            let fronts = non_dominated_sort(&subset);
            let mut chosen = Vec::new();
            for front in fronts {
                if chosen.len() + front.len() <= size {
                    chosen.extend(front.iter().map(|&i| feasible[i]));
                } else {
                    let members: Vec<&Individual> = front.iter().map(|&i| &subset[i]).collect();
                    let distances = crowding_distance(&members);
                    let mut order: Vec<usize> = (0..front.len()).collect();
                    order.sort_by(|&a, &b| {
                        distances[b]
                            .partial_cmp(&distances[a])
                            .unwrap()
                            .then(front[a].cmp(&front[b]))
                    });
                    chosen.extend(
                        order.iter().take(size - chosen.len()).map(|&k| feasible[front[k]]),
                    );
                }
                if chosen.len() == size {
                    break;
                }
            }
            chosen
        }
    };
    chosen.sort_by(|&a, &b| {
        population[b]
            .fitness()
            .partial_cmp(&population[a].fitness())
            .unwrap()
            .then(population[a].evaluation_index.cmp(&population[b].evaluation_index))
    });
    TestSuite {
        short: chosen.len() < size,
        entries: chosen
            .into_iter()
            .map(|i| SuiteEntry {
                scenario: population[i].scenario.clone(),
                fitness: population[i].fitness(),
                mean_novelty: 0.0,
            })
            .collect(),
    }
}

/// Mean pairwise novelty over all unordered suite pairs; 0 for suites
/// smaller than 2. Also fills each entry's `mean_novelty`.
pub fn suite_novelty(suite: &mut TestSuite, problem: &dyn Problem) -> f64 {
    let n = suite.entries.len();
    if n < 2 {
        return 0.0;
    }
    let mut per_entry = vec![0.0f64; n];
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = problem.novelty(&suite.entries[i].scenario, &suite.entries[j].scenario);
            per_entry[i] += d;
            per_entry[j] += d;
            total += d;
        }
    }
    for (entry, sum) in suite.entries.iter_mut().zip(per_entry) {
        entry.mean_novelty = sum / (n - 1) as f64;
    }
    total / (n * (n - 1) / 2) as f64
}

/// Output locations for one experiment.
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub stats_path: PathBuf,
    pub tcs_path: PathBuf,
    pub images_path: PathBuf,
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|source| ReportError::Write { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, contents)
        .map_err(|source| ReportError::Write { path: path.to_path_buf(), source })
}

/// Persists one finished run: a stats JSON, one scenario JSON per suite
/// entry and one SVG image per suite entry. The stats document is
/// byte-reproducible for a fixed seed.
pub fn save_run(
    problem: &dyn RenderScenario,
    suite: &TestSuite,
    stats: &RunStats,
    paths: &OutputPaths,
    run_index: usize,
) -> Result<(), ReportError> {
    let stats_file = paths.stats_path.join(format!("stats_run_{run_index}.json"));
    write_file(&stats_file, &format!("{}\n", serde_json::to_string_pretty(stats).unwrap()))?;

    for (rank, entry) in suite.entries.iter().enumerate() {
        let doc = ScenarioDocument::new(&entry.scenario, problem.gene_specs());
        let tc_file = paths.tcs_path.join(format!("run_{run_index}")).join(format!("tc_{rank}.json"));
        write_file(&tc_file, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;

        let image_file =
            paths.images_path.join(format!("run_{run_index}")).join(format!("tc_{rank}.svg"));
        write_file(&image_file, &problem.render_svg(&entry.scenario))?;
    }
    Ok(())
}
