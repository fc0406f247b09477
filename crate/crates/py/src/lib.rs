//! Python bindings for the scenario generation engine. Exposes the two
//! built-in problems, the three search algorithms and the test-suite
//! post-processing.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use scengen::config::Config;
use scengen::engine::{self, Algo, SearchConfig};
use scengen::genome;
use scengen::lkas::LkasProblem;
use scengen::report::{self, RenderScenario};
use scengen::robot::RobotProblem;

#[pyclass(name = "Scenario", from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: genome::Scenario,
}

#[pymethods]
impl PyScenario {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let n_cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(PyValueError::new_err("all rows must have the same length"));
        }
        Ok(PyScenario { inner: genome::Scenario { rows } })
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows.clone()
    }

    #[getter]
    fn n_cols(&self) -> usize {
        self.inner.n_cols()
    }

    fn __repr__(&self) -> String {
        format!("Scenario({} rows x {} cols)", self.inner.n_rows(), self.inner.n_cols())
    }
}

#[pyclass(name = "SearchConfig", from_py_object)]
#[derive(Clone)]
struct PySearchConfig {
    inner: SearchConfig,
}

#[pymethods]
impl PySearchConfig {
    #[new]
    #[pyo3(signature = (pop_size=150, n_gen=200, mut_rate=0.4, cross_rate=0.9, test_suite_size=30, seed=2022))]
    fn new(
        pop_size: usize,
        n_gen: usize,
        mut_rate: f64,
        cross_rate: f64,
        test_suite_size: usize,
        seed: u64,
    ) -> PyResult<Self> {
        let inner = SearchConfig { pop_size, n_gen, mut_rate, cross_rate, test_suite_size, seed };
        inner.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PySearchConfig { inner })
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

enum AnyProblem {
    Lkas(LkasProblem),
    Robot(RobotProblem),
}

impl AnyProblem {
    fn as_dyn(&self) -> &dyn RenderScenario {
        match self {
            AnyProblem::Lkas(p) => p,
            AnyProblem::Robot(p) => p,
        }
    }
}

/// One of the two built-in test problems, optionally customized by the
/// same JSON config document the command line accepts.
#[pyclass(name = "Problem")]
struct PyProblem {
    problem: AnyProblem,
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (kind, config_json=None))]
    fn new(kind: &str, config_json: Option<&str>) -> PyResult<Self> {
        let config: Config = match config_json {
            Some(text) => {
                let config: Config = serde_json::from_str(text)
                    .map_err(|e| PyValueError::new_err(e.to_string()))?;
                config.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
                config
            }
            None => Config::default(),
        };
        let problem = match kind {
            "lkas" => AnyProblem::Lkas(LkasProblem::new(config.lkas)),
            "robot" => AnyProblem::Robot(RobotProblem::new(config.robot)),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown problem `{other}` (expected lkas or robot)"
                )))
            }
        };
        Ok(PyProblem { problem })
    }

    /// Draws one random scenario.
    fn sample(&self, seed: u64) -> PyScenario {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        PyScenario { inner: self.problem.as_dyn().sample(&mut rng) }
    }

    /// Returns {"fitness", "constraint_violation", "truncated"}.
    fn evaluate<'py>(&self, py: Python<'py>, s: &PyScenario) -> PyResult<Bound<'py, PyDict>> {
        let eval = self.problem.as_dyn().evaluate(&s.inner);
        let out = PyDict::new(py);
        out.set_item("fitness", eval.fitness)?;
        out.set_item("constraint_violation", eval.constraint_violation)?;
        out.set_item("truncated", eval.truncated)?;
        Ok(out)
    }

    /// Scenario dissimilarity in [0, 1].
    fn novelty(&self, a: &PyScenario, b: &PyScenario) -> f64 {
        self.problem.as_dyn().novelty(&a.inner, &b.inner)
    }

    /// Standalone SVG drawing of the scenario.
    fn render_svg(&self, s: &PyScenario) -> String {
        self.problem.as_dyn().render_svg(&s.inner)
    }
}

fn parse_algo(algo: &str) -> PyResult<Algo> {
    algo.parse().map_err(PyValueError::new_err)
}

fn stats_to_dict<'py>(
    py: Python<'py>,
    stats: &engine::RunStats,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    let convergence = PyDict::new(py);
    for (n_eval, fitness) in &stats.convergence {
        convergence.set_item(n_eval, fitness)?;
    }
    out.set_item("convergence", convergence)?;
    out.set_item("suite_fitness", stats.suite_fitness.clone())?;
    out.set_item("suite_novelty", stats.suite_novelty)?;
    out.set_item("seed", stats.seed)?;
    out.set_item("warnings", stats.warnings.clone())?;
    Ok(out)
}

/// Result of one search run: final population plus run statistics.
#[pyclass(name = "RunResult")]
struct PyRunResult {
    population: Vec<engine::Individual>,
    stats: engine::RunStats,
    algo: Algo,
}

#[pymethods]
impl PyRunResult {
    /// Final population as (scenario, fitness, constraint_violation).
    fn population(&self) -> Vec<(PyScenario, f64, f64)> {
        self.population
            .iter()
            .map(|ind| {
                (PyScenario { inner: ind.scenario.clone() }, ind.fitness(), ind.constraint_violation)
            })
            .collect()
    }

    /// Run statistics as a plain dict.
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        stats_to_dict(py, &self.stats)
    }

    /// The `size` best scenarios as (scenario, fitness, mean_novelty),
    /// plus the suite-wide mean pairwise novelty.
    fn test_suite(
        &self,
        problem: &PyProblem,
        size: usize,
    ) -> (Vec<(PyScenario, f64, f64)>, f64) {
        let mut suite = report::get_test_suite(&self.population, size, self.algo);
        let diversity = report::suite_novelty(&mut suite, problem.problem.as_dyn());
        let entries = suite
            .entries
            .into_iter()
            .map(|e| (PyScenario { inner: e.scenario }, e.fitness, e.mean_novelty))
            .collect();
        (entries, diversity)
    }
}

/// Runs one search. `algo` is "random", "ga" or "nsga2".
#[pyfunction]
fn run_search(problem: &PyProblem, algo: &str, config: &PySearchConfig) -> PyResult<PyRunResult> {
    let algo = parse_algo(algo)?;
    let (population, stats) = engine::run_search(problem.problem.as_dyn(), algo, &config.inner, false)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyRunResult { population, stats, algo })
}

/// Compares saved stats directories; writes SVG and CSV artifacts into
/// `out_dir` and returns the artifact paths.
#[pyfunction]
fn compare(stats_dirs: Vec<PathBuf>, names: Vec<String>, out_dir: PathBuf) -> PyResult<Vec<String>> {
    let paths = report::compare(&stats_dirs, &names, &out_dir)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok([
        paths.convergence_svg,
        paths.convergence_csv,
        paths.fitness_box_svg,
        paths.fitness_box_csv,
        paths.diversity_box_svg,
        paths.diversity_box_csv,
    ]
    .iter()
    .map(|p| p.display().to_string())
    .collect())
}

#[pymodule]
fn scengen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PySearchConfig>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(run_search, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
