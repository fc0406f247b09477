//! Multi-run experiment orchestration shared by the CLI and the Python
//! bindings: builds the problem, dispatches the runs (optionally across
//! threads), extracts suites and persists artifacts.

use std::path::PathBuf;

use thiserror::Error;

use crate::config::Config;
use crate::engine::{run_search, Algo, ConfigError, RunStats, SearchConfig};
use crate::lkas::LkasProblem;
use crate::report::{get_test_suite, save_run, suite_novelty, OutputPaths, RenderScenario, ReportError};
use crate::robot::RobotProblem;

/// Default base seed; run `i` uses `base_seed + i`.
pub const DEFAULT_BASE_SEED: u64 = 2022;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Search(#[from] ConfigError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Lkas,
    Robot,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Lkas => "lkas",
            ProblemKind::Robot => "robot",
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lkas" => Ok(ProblemKind::Lkas),
            "robot" => Ok(ProblemKind::Robot),
            other => Err(format!("unknown problem `{other}` (expected lkas or robot)")),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub problem: ProblemKind,
    pub algo: Algo,
    pub runs: usize,
    pub base_seed: u64,
    pub save_results: bool,
    pub jobs: usize,
    pub log: bool,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub stats: Vec<RunStats>,
    /// Populated when results were saved.
    pub paths: Option<OutputPaths>,
}

/// Output directories are partitioned per algorithm, in the
/// `stats_nsga2` / `stats_random` style, so budget-matched experiments
/// can be compared without clobbering each other.
pub fn output_paths(config: &Config, algo: Algo) -> OutputPaths {
    OutputPaths {
        stats_path: PathBuf::from(format!("{}_{}", config.files.stats_path, algo)),
        tcs_path: PathBuf::from(format!("{}_{}", config.files.tcs_path, algo)),
        images_path: PathBuf::from(format!("{}_{}", config.files.images_path, algo)),
    }
}

fn search_config(config: &Config, seed: u64) -> SearchConfig {
    SearchConfig {
        pop_size: config.ga.pop_size,
        n_gen: config.ga.n_gen,
        mut_rate: config.ga.mut_rate,
        cross_rate: config.ga.cross_rate,
        test_suite_size: config.ga.test_suite_size,
        seed,
    }
}

/// One complete run: search, suite extraction, stats completion and
/// (optionally) persistence.
fn run_one<P: RenderScenario>(
    problem: &P,
    config: &Config,
    opts: &ExperimentOptions,
    run_index: usize,
    paths: Option<&OutputPaths>,
) -> Result<RunStats, ExperimentError> {
    let sc = search_config(config, opts.base_seed + run_index as u64);
    let (population, mut stats) = run_search(problem, opts.algo, &sc, opts.log)?;
    let mut suite = get_test_suite(&population, sc.test_suite_size, opts.algo);
    stats.suite_fitness = suite.entries.iter().map(|e| e.fitness).collect();
    stats.suite_novelty = suite_novelty(&mut suite, problem);
    if suite.short {
        stats.warnings.push(format!(
            "only {} feasible solutions for a suite of {}",
            suite.entries.len(),
            sc.test_suite_size
        ));
    }
    if let Some(paths) = paths {
        save_run(problem, &suite, &stats, paths, run_index)?;
    }
    Ok(stats)
}

fn run_all<P: RenderScenario + Sync>(
    problem: &P,
    config: &Config,
    opts: &ExperimentOptions,
) -> Result<ExperimentOutcome, ExperimentError> {
    let paths = opts.save_results.then(|| output_paths(config, opts.algo));
    let jobs = opts.jobs.max(1).min(opts.runs.max(1));
    let stats: Vec<Result<RunStats, ExperimentError>> = if jobs <= 1 {
        (0..opts.runs).map(|i| run_one(problem, config, opts, i, paths.as_ref())).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..opts.runs)
                .map(|i| {
                    let paths = paths.as_ref();
                    scope.spawn(move || run_one(problem, config, opts, i, paths))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
        })
    };
    let stats = stats.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentOutcome { stats, paths })
}

/// Executes `opts.runs` independent searches with seeds `base_seed + i`.
pub fn run_experiment(
    config: &Config,
    opts: &ExperimentOptions,
) -> Result<ExperimentOutcome, ExperimentError> {
    match opts.problem {
        ProblemKind::Lkas => run_all(&LkasProblem::new(config.lkas.clone()), config, opts),
        ProblemKind::Robot => run_all(&RobotProblem::new(config.robot.clone()), config, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> Config {
        let mut config = Config::default();
        config.ga.pop_size = 10;
        config.ga.n_gen = 3;
        config.ga.test_suite_size = 4;
        config
    }

    fn opts(algo: Algo, runs: usize) -> ExperimentOptions {
        ExperimentOptions {
            problem: ProblemKind::Robot,
            algo,
            runs,
            base_seed: 7,
            save_results: false,
            jobs: 1,
            log: false,
        }
    }

    #[test]
    fn experiment_produces_one_stats_per_run() {
        let outcome = run_experiment(&small_config(), &opts(Algo::Ga, 3)).unwrap();
        assert_eq!(outcome.stats.len(), 3);
        assert!(outcome.paths.is_none());
        // Seeds are base + index.
        let seeds: Vec<u64> = outcome.stats.iter().map(|s| s.seed).collect();
        assert_eq!(seeds, vec![7, 8, 9]);
    }

    #[test]
    fn parallel_jobs_match_sequential_results() {
        let config = small_config();
        let sequential = run_experiment(&config, &opts(Algo::Nsga2, 4)).unwrap();
        let mut parallel_opts = opts(Algo::Nsga2, 4);
        parallel_opts.jobs = 4;
        let parallel = run_experiment(&config, &parallel_opts).unwrap();
        for (a, b) in sequential.stats.iter().zip(&parallel.stats) {
            // runtime_s is wall clock; everything else must match.
            assert_eq!(a.convergence, b.convergence);
            assert_eq!(a.suite_fitness, b.suite_fitness);
            assert_eq!(a.suite_novelty, b.suite_novelty);
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.warnings, b.warnings);
        }
    }

    #[test]
    fn algo_suffix_partitions_output_dirs() {
        let config = Config::default();
        let paths = output_paths(&config, Algo::Nsga2);
        assert_eq!(paths.stats_path, PathBuf::from("stats_nsga2"));
        assert_eq!(paths.tcs_path, PathBuf::from("tcs_nsga2"));
        assert_eq!(paths.images_path, PathBuf::from("images_nsga2"));
    }
}
