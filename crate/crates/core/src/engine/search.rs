//! The three search loops: random search, single-objective GA and NSGA-II.
//!
//! All three spend exactly `pop_size * n_gen` problem evaluations: the
//! initial population counts as generation 1 and every later generation
//! evaluates `pop_size` offspring. Convergence is keyed by the cumulative
//! evaluation count at the end of each generation, which puts the three
//! algorithms on the same budget grid.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use super::sort::{binary_tournament_select, crowding_distance, non_dominated_sort, TournamentKey};
use super::{ConfigError, Individual, ObjectiveVector, Problem, SearchConfig};

/// Per-run experiment record. `convergence` maps cumulative evaluation
/// counts to the best feasible fitness found so far; entries are absent
/// for generations before the first feasible solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub convergence: BTreeMap<u64, f64>,
    pub suite_fitness: Vec<f64>,
    pub suite_novelty: f64,
    pub seed: u64,
    pub warnings: Vec<String>,
    /// Wall-clock time; not serialized so that stats files are
    /// byte-reproducible for a fixed seed.
    #[serde(skip)]
    pub runtime_s: f64,
}

impl RunStats {
    fn new(seed: u64) -> Self {
        RunStats {
            convergence: BTreeMap::new(),
            suite_fitness: Vec::new(),
            suite_novelty: 0.0,
            seed,
            warnings: Vec::new(),
            runtime_s: 0.0,
        }
    }
}

struct Evaluator<'a> {
    problem: &'a dyn Problem,
    n_objectives: usize,
    count: u64,
    truncated: u64,
}

impl<'a> Evaluator<'a> {
    fn new(problem: &'a dyn Problem, n_objectives: usize) -> Self {
        Evaluator { problem, n_objectives, count: 0, truncated: 0 }
    }

    fn evaluate(&mut self, scenario: crate::genome::Scenario) -> Individual {
        let eval = self.problem.evaluate(&scenario);
        self.count += 1;
        if eval.truncated {
            self.truncated += 1;
        }
        let mut values = vec![0.0; self.n_objectives];
        values[0] = -eval.fitness;
        Individual {
            scenario,
            objectives: ObjectiveVector::new(values),
            constraint_violation: eval.constraint_violation,
            evaluation_index: self.count,
        }
    }
}

/// Best feasible fitness tracker feeding the convergence map.
struct Convergence {
    best: Option<f64>,
    map: BTreeMap<u64, f64>,
}

impl Convergence {
    fn new() -> Self {
        Convergence { best: None, map: BTreeMap::new() }
    }

    fn observe(&mut self, population: &[Individual]) {
        for ind in population.iter().filter(|i| i.is_feasible()) {
            let f = ind.fitness();
            if self.best.is_none_or(|b| f > b) {
                self.best = Some(f);
            }
        }
    }

    fn record(&mut self, n_eval: u64) {
        if let Some(best) = self.best {
            self.map.insert(n_eval, best);
        }
    }
}

fn cv_min(population: &[Individual]) -> f64 {
    population
        .iter()
        .map(|i| i.constraint_violation)
        .fold(f64::INFINITY, f64::min)
}

fn log_header(log: bool, last_col: &str) {
    if log {
        println!("{:>6} | {:>9} | {:>12} | {:>12}", "n_gen", "n_eval", "cv_min", last_col);
    }
}

fn log_line(log: bool, gen: usize, n_eval: u64, cv: f64, last: Option<f64>) {
    if log {
        match last {
            Some(v) => println!("{:>6} | {:>9} | {:>12.6} | {:>12.6}", gen, n_eval, cv, v),
            None => println!("{:>6} | {:>9} | {:>12.6} | {:>12}", gen, n_eval, cv, "-"),
        }
    }
}

/// Sort key for elitist single-objective survival: feasible first, then
/// better fitness objective (infeasible: lower violation), index last.
fn ga_survival_key(ind: &Individual) -> (u8, f64, u64) {
    if ind.is_feasible() {
        (0, ind.objectives.values[0], ind.evaluation_index)
    } else {
        (1, ind.constraint_violation, ind.evaluation_index)
    }
}

fn sort_by_ga_key(population: &mut [Individual]) {
    population.sort_by(|a, b| {
        let (ka, kb) = (ga_survival_key(a), ga_survival_key(b));
        ka.0.cmp(&kb.0)
            .then(ka.1.partial_cmp(&kb.1).unwrap())
            .then(ka.2.cmp(&kb.2))
    });
}

/// Random search: `pop_size * n_gen` independent samples, keeping the
/// `pop_size` best feasible individuals seen so far.
pub fn run_random(
    problem: &dyn Problem,
    config: &SearchConfig,
    log: bool,
) -> Result<(Vec<Individual>, RunStats), ConfigError> {
    config.validate()?;
    let start = std::time::Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut evaluator = Evaluator::new(problem, 1);
    let mut convergence = Convergence::new();
    let mut retained: Vec<Individual> = Vec::new();
    let mut seen_cv_min = f64::INFINITY;

    log_header(log, "f_opt");
    for gen in 1..=config.n_gen {
        let batch: Vec<Individual> = (0..config.pop_size)
            .map(|_| {
                let s = problem.sample(&mut rng);
                evaluator.evaluate(s)
            })
            .collect();
        seen_cv_min = seen_cv_min.min(cv_min(&batch));
        convergence.observe(&batch);
        retained.extend(batch.into_iter().filter(Individual::is_feasible));
        sort_by_ga_key(&mut retained);
        retained.truncate(config.pop_size);
        convergence.record(evaluator.count);
        log_line(log, gen, evaluator.count, seen_cv_min, convergence.best);
    }

    let mut stats = RunStats::new(config.seed);
    stats.convergence = convergence.map;
    if retained.is_empty() {
        stats.warnings.push("no feasible individual found".to_string());
    }
    if evaluator.truncated > 0 {
        stats
            .warnings
            .push(format!("{} evaluations hit the simulation step cap", evaluator.truncated));
    }
    stats.runtime_s = start.elapsed().as_secs_f64();
    Ok((retained, stats))
}

/// Produces `pop_size` offspring from `population` via binary tournaments,
/// crossover with probability `cross_rate` and mutation with probability
/// `mut_rate` per offspring.
fn reproduce(
    problem: &dyn Problem,
    population: &[Individual],
    keys: &[TournamentKey],
    config: &SearchConfig,
    rng: &mut ChaCha12Rng,
    evaluator: &mut Evaluator,
) -> Vec<Individual> {
    let mut offspring = Vec::with_capacity(config.pop_size);
    while offspring.len() < config.pop_size {
        let a = &population[binary_tournament_select(keys, rng)].scenario;
        let b = &population[binary_tournament_select(keys, rng)].scenario;
        let (c1, c2) = if rng.random_bool(config.cross_rate) {
            problem.crossover(a, b, rng)
        } else {
            (a.clone(), b.clone())
        };
        for child in [c1, c2] {
            if offspring.len() == config.pop_size {
                break;
            }
            let child = if rng.random_bool(config.mut_rate) {
                problem.mutate(&child, rng)
            } else {
                child
            };
            offspring.push(evaluator.evaluate(child));
        }
    }
    offspring
}

/// Single-objective GA with (mu + lambda) elitist truncation survival.
pub fn run_ga(
    problem: &dyn Problem,
    config: &SearchConfig,
    log: bool,
) -> Result<(Vec<Individual>, RunStats), ConfigError> {
    config.validate()?;
    let start = std::time::Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut evaluator = Evaluator::new(problem, 1);
    let mut convergence = Convergence::new();

    let mut population: Vec<Individual> = (0..config.pop_size)
        .map(|_| {
            let s = problem.sample(&mut rng);
            evaluator.evaluate(s)
        })
        .collect();
    convergence.observe(&population);
    convergence.record(evaluator.count);
    log_header(log, "f_opt");
    log_line(log, 1, evaluator.count, cv_min(&population), convergence.best);

    for gen in 2..=config.n_gen {
        let keys: Vec<TournamentKey> = population
            .iter()
            .map(|ind| TournamentKey {
                constraint_violation: ind.constraint_violation,
                primary: ind.objectives.values[0],
                secondary: 0.0,
            })
            .collect();
        let offspring = reproduce(problem, &population, &keys, config, &mut rng, &mut evaluator);
        convergence.observe(&offspring);
        population.extend(offspring);
        sort_by_ga_key(&mut population);
        population.truncate(config.pop_size);
        convergence.record(evaluator.count);
        log_line(log, gen, evaluator.count, cv_min(&population), convergence.best);
    }

    let mut stats = RunStats::new(config.seed);
    stats.convergence = convergence.map;
    if evaluator.truncated > 0 {
        stats
            .warnings
            .push(format!("{} evaluations hit the simulation step cap", evaluator.truncated));
    }
    stats.runtime_s = start.elapsed().as_secs_f64();
    Ok((population, stats))
}

/// Indices of the (up to) 5 individuals with the highest fitness, the
/// reference set for the novelty objective.
fn novelty_reference_indices(population: &[Individual]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| {
        population[b]
            .fitness()
            .partial_cmp(&population[a].fitness())
            .unwrap()
            .then(a.cmp(&b))
    });
    order.truncate(5);
    order
}

/// Rewrites the novelty objective of every individual: mean novelty
/// against the current top-5-by-fitness reference set.
fn assign_novelty(problem: &dyn Problem, population: &mut [Individual]) {
    let refs = novelty_reference_indices(population);
    if refs.is_empty() {
        return;
    }
    let ref_scenarios: Vec<crate::genome::Scenario> =
        refs.iter().map(|&i| population[i].scenario.clone()).collect();
    for ind in population.iter_mut() {
        let mean: f64 = ref_scenarios
            .iter()
            .map(|r| problem.novelty(&ind.scenario, r))
            .sum::<f64>()
            / ref_scenarios.len() as f64;
        ind.objectives.values[1] = -mean;
    }
}

/// NSGA-II survival among feasible individuals: whole fronts first, the
/// last partial front by descending crowding distance (ties to the lower
/// index). Returns at most `n` indices into `population`.
fn nsga_survivor_indices(population: &[Individual], candidates: &[usize], n: usize) -> Vec<usize> {
    let subset: Vec<Individual> = candidates.iter().map(|&i| population[i].clone()).collect();
    let fronts = non_dominated_sort(&subset);
    let mut chosen = Vec::with_capacity(n);
    for front in fronts {
        if chosen.len() + front.len() <= n {
            chosen.extend(front.iter().map(|&i| candidates[i]));
        } else {
            let members: Vec<&Individual> = front.iter().map(|&i| &subset[i]).collect();
            let distances = crowding_distance(&members);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| {
                distances[b].partial_cmp(&distances[a]).unwrap().then(front[a].cmp(&front[b]))
            });
            for &k in order.iter().take(n - chosen.len()) {
                chosen.push(candidates[front[k]]);
            }
        }
        if chosen.len() == n {
            break;
        }
    }
    chosen
}

/// Survival over a combined parent+offspring pool: feasibility first, then
/// front rank and crowding distance; infeasible slots (when fewer than
/// `pop_size` feasible individuals exist) are filled by lowest violation.
fn nsga_survival(population: Vec<Individual>, pop_size: usize) -> Vec<Individual> {
    let feasible: Vec<usize> =
        (0..population.len()).filter(|&i| population[i].is_feasible()).collect();
    let mut keep: Vec<usize> = if feasible.len() >= pop_size {
        nsga_survivor_indices(&population, &feasible, pop_size)
    } else {
        let mut infeasible: Vec<usize> =
            (0..population.len()).filter(|&i| !population[i].is_feasible()).collect();
        infeasible.sort_by(|&a, &b| {
            population[a]
                .constraint_violation
                .partial_cmp(&population[b].constraint_violation)
                .unwrap()
                .then(population[a].evaluation_index.cmp(&population[b].evaluation_index))
        });
        let mut keep = feasible;
        keep.extend(infeasible.into_iter().take(pop_size - keep.len()));
        keep
    };
    keep.sort_unstable();
    let mut keep_flags = vec![false; population.len()];
    for &i in &keep {
        keep_flags[i] = true;
    }
    population
        .into_iter()
        .zip(keep_flags)
        .filter_map(|(ind, keep)| keep.then_some(ind))
        .collect()
}

/// Two-objective NSGA-II over (fault revealing power, novelty).
pub fn run_nsga2(
    problem: &dyn Problem,
    config: &SearchConfig,
    log: bool,
) -> Result<(Vec<Individual>, RunStats), ConfigError> {
    config.validate()?;
    let start = std::time::Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut evaluator = Evaluator::new(problem, 2);
    let mut convergence = Convergence::new();

    let mut population: Vec<Individual> = (0..config.pop_size)
        .map(|_| {
            let s = problem.sample(&mut rng);
            evaluator.evaluate(s)
        })
        .collect();
    assign_novelty(problem, &mut population);
    convergence.observe(&population);
    convergence.record(evaluator.count);
    log_header(log, "n_nds");
    log_line(log, 1, evaluator.count, cv_min(&population), Some(n_nds(&population) as f64));

    for gen in 2..=config.n_gen {
        let keys = nsga_tournament_keys(&population);
        let offspring = reproduce(problem, &population, &keys, config, &mut rng, &mut evaluator);
        convergence.observe(&offspring);
        population.extend(offspring);
        assign_novelty(problem, &mut population);
        population = nsga_survival(population, config.pop_size);
        convergence.record(evaluator.count);
        log_line(log, gen, evaluator.count, cv_min(&population), Some(n_nds(&population) as f64));
    }

    let mut stats = RunStats::new(config.seed);
    stats.convergence = convergence.map;
    if evaluator.truncated > 0 {
        stats
            .warnings
            .push(format!("{} evaluations hit the simulation step cap", evaluator.truncated));
    }
    stats.runtime_s = start.elapsed().as_secs_f64();
    Ok((population, stats))
}

/// Size of the non-dominated set among feasible individuals.
pub fn n_nds(population: &[Individual]) -> usize {
    let feasible: Vec<Individual> =
        population.iter().filter(|i| i.is_feasible()).cloned().collect();
    non_dominated_sort(&feasible).first().map_or(0, |f| f.len())
}

fn nsga_tournament_keys(population: &[Individual]) -> Vec<TournamentKey> {
    let feasible: Vec<usize> =
        (0..population.len()).filter(|&i| population[i].is_feasible()).collect();
    let subset: Vec<Individual> = feasible.iter().map(|&i| population[i].clone()).collect();
    let fronts = non_dominated_sort(&subset);

    let mut rank = vec![f64::MAX; population.len()];
    let mut crowding = vec![0.0f64; population.len()];
    for (r, front) in fronts.iter().enumerate() {
        let members: Vec<&Individual> = front.iter().map(|&i| &subset[i]).collect();
        let distances = crowding_distance(&members);
        for (k, &i) in front.iter().enumerate() {
            rank[feasible[i]] = r as f64;
            crowding[feasible[i]] = distances[k];
        }
    }
    (0..population.len())
        .map(|i| TournamentKey {
            constraint_violation: population[i].constraint_violation,
            primary: rank[i],
            secondary: -crowding[i],
        })
        .collect()
}
