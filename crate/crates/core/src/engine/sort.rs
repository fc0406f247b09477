//! Non-dominated sorting, crowding distance and mating selection.

use rand::Rng;

use super::Individual;

/// Sorts a population into Pareto fronts (minimization). Front 0 holds the
/// individuals dominated by none; individuals in front `k` are dominated
/// only by members of earlier fronts. Returns indices into `population`.
pub fn non_dominated_sort(population: &[Individual]) -> Vec<Vec<usize>> {
    let n = population.len();
    if n == 0 {
        return Vec::new();
    }
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&population[i].objectives, &population[j].objectives);
            if a.dominates(b) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if b.dominates(a) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each front member. Boundary individuals per
/// objective get infinite distance; interior distances are sums of
/// neighbor gaps normalized by the objective range. An objective with
/// zero range contributes nothing.
pub fn crowding_distance(front: &[&Individual]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let n_obj = front[0].objectives.values.len();
    let mut distance = vec![0.0f64; n];
    for m in 0..n_obj {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            front[a].objectives.values[m]
                .partial_cmp(&front[b].objectives.values[m])
                .unwrap()
                .then(a.cmp(&b))
        });
        let lo = front[order[0]].objectives.values[m];
        let hi = front[order[n - 1]].objectives.values[m];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range == 0.0 {
            continue;
        }
        for w in order.windows(3) {
            let gap = front[w[2]].objectives.values[m] - front[w[0]].objectives.values[m];
            distance[w[1]] += gap / range;
        }
    }
    distance
}

/// Comparison key used by mating selection. Feasibility wins first; among
/// infeasible individuals the lower violation wins; among feasible ones
/// the lower `primary` wins (GA: fitness objective; NSGA-II: front rank),
/// then the lower `secondary` (NSGA-II: negated crowding distance), then
/// the lower population index.
#[derive(Debug, Clone, Copy)]
pub struct TournamentKey {
    pub constraint_violation: f64,
    pub primary: f64,
    pub secondary: f64,
}

impl TournamentKey {
    pub fn beats(&self, other: &TournamentKey) -> bool {
        let (a_feas, b_feas) = (self.constraint_violation == 0.0, other.constraint_violation == 0.0);
        match (a_feas, b_feas) {
            (true, false) => true,
            (false, true) => false,
            (false, false) => self.constraint_violation < other.constraint_violation,
            (true, true) => {
                if self.primary != other.primary {
                    self.primary < other.primary
                } else {
                    self.secondary < other.secondary
                }
            }
        }
    }
}

/// Binary tournament: two uniform picks, the better key wins; an exact tie
/// goes to the lower index. Returns the winner's index.
pub fn binary_tournament_select<R: Rng + ?Sized>(keys: &[TournamentKey], rng: &mut R) -> usize {
    debug_assert!(!keys.is_empty());
    let i = rng.random_range(0..keys.len());
    let j = rng.random_range(0..keys.len());
    let (lo, hi) = (i.min(j), i.max(j));
    if keys[hi].beats(&keys[lo]) {
        hi
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ObjectiveVector;
    use crate::genome::Scenario;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ind(objectives: &[f64]) -> Individual {
        Individual {
            scenario: Scenario { rows: vec![] },
            objectives: ObjectiveVector::new(objectives.to_vec()),
            constraint_violation: 0.0,
            evaluation_index: 0,
        }
    }

    fn pop(objs: &[(f64, f64)]) -> Vec<Individual> {
        objs.iter().map(|&(a, b)| ind(&[a, b])).collect()
    }

    /// Brute-force oracle: front of the remaining set, peeled repeatedly.
    fn brute_force_fronts(population: &[Individual]) -> Vec<Vec<usize>> {
        let mut remaining: Vec<usize> = (0..population.len()).collect();
        let mut fronts = Vec::new();
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    remaining.iter().all(|&j| {
                        !population[j].objectives.dominates(&population[i].objectives)
                    })
                })
                .collect();
            remaining.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        fronts
    }

    #[test]
    fn sort_known_example() {
        let p = pop(&[(1.0, 5.0), (2.0, 3.0), (3.0, 1.0), (2.0, 4.0), (3.0, 3.0)]);
        let fronts = non_dominated_sort(&p);
        assert_eq!(fronts, vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn sort_single_individual() {
        let p = pop(&[(1.0, 1.0)]);
        assert_eq!(non_dominated_sort(&p), vec![vec![0]]);
    }

    #[test]
    fn sort_identical_objectives() {
        let p = pop(&[(2.0, 2.0); 4]);
        assert_eq!(non_dominated_sort(&p), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn sort_empty_population() {
        assert!(non_dominated_sort(&[]).is_empty());
    }

    #[test]
    fn sort_matches_brute_force_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..200 {
            let n = rng.random_range(1..=20);
            let p: Vec<Individual> = (0..n)
                .map(|_| {
                    ind(&[
                        rng.random_range(0..6) as f64,
                        rng.random_range(0..6) as f64,
                    ])
                })
                .collect();
            assert_eq!(non_dominated_sort(&p), brute_force_fronts(&p));
        }
    }

    #[test]
    fn crowding_known_example() {
        let p = pop(&[(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)]);
        let refs: Vec<&Individual> = p.iter().collect();
        let d = crowding_distance(&refs);
        assert!(d[0].is_infinite());
        assert!((d[1] - 2.0).abs() < 1e-12);
        assert!(d[2].is_infinite());
    }

    #[test]
    fn crowding_small_fronts_all_infinite() {
        let p = pop(&[(1.0, 1.0)]);
        let refs: Vec<&Individual> = p.iter().collect();
        assert!(crowding_distance(&refs).iter().all(|d| d.is_infinite()));

        let p = pop(&[(1.0, 2.0), (2.0, 1.0)]);
        let refs: Vec<&Individual> = p.iter().collect();
        assert!(crowding_distance(&refs).iter().all(|d| d.is_infinite()));
    }

    #[test]
    fn crowding_degenerate_objective_range() {
        // Second objective constant: only the first contributes.
        let p = pop(&[(1.0, 2.0), (2.0, 2.0), (4.0, 2.0)]);
        let refs: Vec<&Individual> = p.iter().collect();
        let d = crowding_distance(&refs);
        assert!((d[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tournament_feasible_beats_infeasible() {
        let infeasible =
            TournamentKey { constraint_violation: 1.0, primary: -100.0, secondary: 0.0 };
        let feasible = TournamentKey { constraint_violation: 0.0, primary: 0.0, secondary: 0.0 };
        assert!(feasible.beats(&infeasible));
        assert!(!infeasible.beats(&feasible));
    }

    #[test]
    fn tournament_lower_violation_wins() {
        let worse = TournamentKey { constraint_violation: 2.0, primary: 0.0, secondary: 0.0 };
        let better = TournamentKey { constraint_violation: 0.5, primary: 0.0, secondary: 0.0 };
        assert!(better.beats(&worse));
        assert!(!worse.beats(&better));
    }

    #[test]
    fn tournament_primary_then_secondary() {
        let a = TournamentKey { constraint_violation: 0.0, primary: 1.0, secondary: 5.0 };
        let b = TournamentKey { constraint_violation: 0.0, primary: 2.0, secondary: 0.0 };
        let c = TournamentKey { constraint_violation: 0.0, primary: 1.0, secondary: 2.0 };
        assert!(a.beats(&b));
        assert!(c.beats(&a));
        // An exact tie beats nobody, so selection falls to the lower index.
        assert!(!a.beats(&a));
    }

    #[test]
    fn tournament_never_picks_the_strictly_worse_of_two() {
        let keys = [
            TournamentKey { constraint_violation: 0.0, primary: 1.0, secondary: 0.0 },
            TournamentKey { constraint_violation: 1.0, primary: 0.0, secondary: 0.0 },
        ];
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let picks: Vec<usize> =
            (0..200).map(|_| binary_tournament_select(&keys, &mut rng)).collect();
        // Index 1 only appears when both draws landed on it; the better key
        // must still dominate the picks.
        let wins_0 = picks.iter().filter(|&&p| p == 0).count();
        assert!(wins_0 > 100, "index 0 won only {wins_0} of 200");
    }
}
