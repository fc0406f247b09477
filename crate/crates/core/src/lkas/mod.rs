//! LKAS test problem: scenarios decode into road centerlines, fitness is
//! the maximum lane deviation of the simplified vehicle model.

pub mod road;
pub mod vehicle;

pub use road::{decode_road, validate_road, RoadDocument, RoadParams, RoadPolyline};
pub use vehicle::{simulate_deviation, SimOutcome, VehicleParams};

use serde::{Deserialize, Serialize};

use crate::engine::{Evaluation, Problem};
use crate::genome::{GeneSpec, Scenario};
use road::{decode_genes, RoadAction};

/// Deviation above which a scenario counts as a failure in reports:
/// half lane width plus half a car width.
pub const FAILURE_DEVIATION: f64 = 2.2;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LkasConfig {
    pub map_size: f64,
    pub lane_width: f64,
    pub turn_radius: f64,
    pub straight_min: f64,
    pub straight_max: f64,
    pub angle_min: f64,
    pub angle_max: f64,
    pub min_cols: usize,
    pub max_cols: usize,
    /// Scenarios with deviation below this are infeasible when > 0.
    pub min_fitness: f64,
    pub vehicle: VehicleParams,
}

impl Default for LkasConfig {
    fn default() -> Self {
        LkasConfig {
            map_size: 200.0,
            lane_width: 4.0,
            turn_radius: 15.0,
            straight_min: 5.0,
            straight_max: 50.0,
            angle_min: 5.0,
            angle_max: 85.0,
            min_cols: 8,
            max_cols: 15,
            min_fitness: 0.0,
            vehicle: VehicleParams::default(),
        }
    }
}

pub struct LkasProblem {
    config: LkasConfig,
    road_params: RoadParams,
    specs: Vec<GeneSpec>,
}

impl LkasProblem {
    pub fn new(config: LkasConfig) -> Self {
        let specs = vec![
            GeneSpec::categorical("action", &["straight", "turn_left", "turn_right"]),
            GeneSpec::real("length", config.straight_min, config.straight_max),
            GeneSpec::real("angle", config.angle_min, config.angle_max),
        ];
        let road_params = RoadParams {
            map_size: config.map_size,
            lane_width: config.lane_width,
            turn_radius: config.turn_radius,
            start: (config.map_size / 2.0, config.lane_width),
            ..RoadParams::default()
        };
        LkasProblem { config, road_params, specs }
    }

    pub fn road_params(&self) -> &RoadParams {
        &self.road_params
    }

    pub fn config(&self) -> &LkasConfig {
        &self.config
    }

    pub fn decode(&self, s: &Scenario) -> RoadPolyline {
        decode_road(s, &self.road_params)
    }
}

impl Default for LkasProblem {
    fn default() -> Self {
        LkasProblem::new(LkasConfig::default())
    }
}

impl Problem for LkasProblem {
    fn gene_specs(&self) -> &[GeneSpec] {
        &self.specs
    }

    fn length_bounds(&self) -> (usize, usize) {
        (self.config.min_cols, self.config.max_cols)
    }

    fn evaluate_fitness(&self, s: &Scenario) -> f64 {
        simulate_deviation(&self.decode(s), &self.config.vehicle).max_deviation
    }

    fn validate(&self, s: &Scenario) -> f64 {
        let road = self.decode(s);
        let mut cv = validate_road(&road, self.config.map_size);
        if cv == 0.0 && self.config.min_fitness > 0.0 {
            let deviation = simulate_deviation(&road, &self.config.vehicle).max_deviation;
            if deviation < self.config.min_fitness {
                cv = self.config.min_fitness - deviation;
            }
        }
        cv
    }

    fn novelty(&self, a: &Scenario, b: &Scenario) -> f64 {
        lkas_novelty(a, b, &self.config)
    }

    fn evaluate(&self, s: &Scenario) -> Evaluation {
        let road = self.decode(s);
        let cv = validate_road(&road, self.config.map_size);
        if cv > 0.0 {
            return Evaluation { fitness: 0.0, constraint_violation: cv, truncated: false };
        }
        let outcome = simulate_deviation(&road, &self.config.vehicle);
        let threshold_cv = if self.config.min_fitness > 0.0
            && outcome.max_deviation < self.config.min_fitness
        {
            self.config.min_fitness - outcome.max_deviation
        } else {
            0.0
        };
        Evaluation {
            fitness: if threshold_cv == 0.0 { outcome.max_deviation } else { 0.0 },
            constraint_violation: threshold_cv,
            truncated: outcome.truncated,
        }
    }
}

/// Scenario dissimilarity: 1 minus the fraction of aligned columns whose
/// action matches and whose value differs by less than 5% of that
/// action's value range, normalized by the longer scenario.
pub fn lkas_novelty(a: &Scenario, b: &Scenario, config: &LkasConfig) -> f64 {
    let (ga, gb) = (decode_genes(a), decode_genes(b));
    let max_len = ga.len().max(gb.len());
    if max_len == 0 {
        return 0.0;
    }
    let matches = ga
        .iter()
        .zip(&gb)
        .filter(|(x, y)| {
            if x.action != y.action {
                return false;
            }
            let range = if x.action == RoadAction::Straight {
                config.straight_max - config.straight_min
            } else {
                config.angle_max - config.angle_min
            };
            (x.value - y.value).abs() < 0.05 * range
        })
        .count();
    1.0 - matches as f64 / max_len as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Problem;
    use road::{ROW_ANGLE, ROW_LENGTH};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn scenario(cols: &[(i64, f64, f64)]) -> Scenario {
        let mut rows = vec![vec![0.0; cols.len()]; 3];
        for (c, &(action, length, angle)) in cols.iter().enumerate() {
            rows[0][c] = action as f64;
            rows[ROW_LENGTH][c] = length;
            rows[ROW_ANGLE][c] = angle;
        }
        Scenario { rows }
    }

    #[test]
    fn novelty_of_identity_is_zero() {
        let p = LkasProblem::default();
        let s = scenario(&[(0, 10.0, 45.0), (1, 20.0, 60.0)]);
        assert_eq!(p.novelty(&s, &s), 0.0);
    }

    #[test]
    fn novelty_of_disjoint_actions_is_one() {
        let p = LkasProblem::default();
        let a = scenario(&[(0, 10.0, 45.0), (0, 20.0, 45.0)]);
        let b = scenario(&[(1, 10.0, 45.0), (2, 20.0, 45.0)]);
        assert_eq!(p.novelty(&a, &b), 1.0);
    }

    #[test]
    fn novelty_of_prefix_scenario() {
        let p = LkasProblem::default();
        let cols: Vec<(i64, f64, f64)> = (0..8).map(|i| (0, 10.0 + i as f64, 45.0)).collect();
        let a = scenario(&cols[..4]);
        let b = scenario(&cols);
        assert_eq!(p.novelty(&a, &b), 0.5);
        assert_eq!(p.novelty(&b, &a), 0.5);
    }

    #[test]
    fn novelty_is_symmetric_and_bounded() {
        let p = LkasProblem::default();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..200 {
            let a = p.sample(&mut rng);
            let b = p.sample(&mut rng);
            let n1 = p.novelty(&a, &b);
            let n2 = p.novelty(&b, &a);
            assert_eq!(n1, n2);
            assert!((0.0..=1.0).contains(&n1));
        }
    }

    #[test]
    fn value_tolerance_counts_as_match() {
        let p = LkasProblem::default();
        // Straight range is 45 m wide; 5% is 2.25 m.
        let a = scenario(&[(0, 10.0, 45.0)]);
        let close = scenario(&[(0, 11.0, 45.0)]);
        let far = scenario(&[(0, 14.0, 45.0)]);
        assert_eq!(p.novelty(&a, &close), 0.0);
        assert_eq!(p.novelty(&a, &far), 1.0);
    }

    #[test]
    fn min_fitness_marks_tame_roads_infeasible() {
        let mut config = LkasConfig::default();
        config.min_fitness = 0.5;
        let p = LkasProblem::new(config);
        // A short straight road tracks near-perfectly: deviation below 0.5.
        let s = scenario(&[(0, 20.0, 45.0), (0, 20.0, 45.0)]);
        let eval = p.evaluate(&s);
        assert!(eval.constraint_violation > 0.0);
        assert_eq!(eval.fitness, 0.0);
        assert_eq!(p.validate(&s), eval.constraint_violation);
    }

    #[test]
    fn evaluate_matches_split_route() {
        let p = LkasProblem::default();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..20 {
            let s = p.sample(&mut rng);
            let eval = p.evaluate(&s);
            assert_eq!(eval.constraint_violation, p.validate(&s));
            if eval.constraint_violation == 0.0 {
                assert_eq!(eval.fitness, p.evaluate_fitness(&s));
            }
        }
    }
}
