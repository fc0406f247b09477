//! Matrix scenario representation shared by all test problems.
//!
//! A scenario is a 2D matrix of numbers: rows are parameters (one per
//! [`GeneSpec`]), columns are environment elements (road segments,
//! obstacle walls). Categorical and integer genes are stored as
//! integer-valued reals and decoded at the problem level.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenomeError {
    #[error("gene spec list is empty")]
    EmptySpec,
    #[error("invalid gene spec `{0}`: {1}")]
    InvalidSpec(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneKind {
    Categorical,
    Integer,
    Real,
}

/// Describes one row of the scenario matrix: its name, kind and value range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneSpec {
    pub name: String,
    pub kind: GeneKind,
    pub min: f64,
    pub max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
}

impl GeneSpec {
    pub fn real(name: &str, min: f64, max: f64) -> Self {
        GeneSpec {
            name: name.to_string(),
            kind: GeneKind::Real,
            min,
            max,
            categories: None,
        }
    }

    pub fn integer(name: &str, min: i64, max: i64) -> Self {
        GeneSpec {
            name: name.to_string(),
            kind: GeneKind::Integer,
            min: min as f64,
            max: max as f64,
            categories: None,
        }
    }

    pub fn categorical(name: &str, categories: &[&str]) -> Self {
        GeneSpec {
            name: name.to_string(),
            kind: GeneKind::Categorical,
            min: 0.0,
            max: (categories.len().max(1) - 1) as f64,
            categories: Some(categories.iter().map(|s| s.to_string()).collect()),
        }
    }

    pub fn validate(&self) -> Result<(), GenomeError> {
        if self.min > self.max {
            return Err(GenomeError::InvalidSpec(
                self.name.clone(),
                format!("min {} > max {}", self.min, self.max),
            ));
        }
        if self.kind == GeneKind::Categorical
            && self.categories.as_ref().is_none_or(|c| c.is_empty())
        {
            return Err(GenomeError::InvalidSpec(
                self.name.clone(),
                "categorical gene requires non-empty categories".into(),
            ));
        }
        Ok(())
    }

    fn sample_value<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            GeneKind::Real => rng.random_range(self.min..=self.max),
            GeneKind::Integer | GeneKind::Categorical => {
                rng.random_range(self.min as i64..=self.max as i64) as f64
            }
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.min && value <= self.max
    }
}

/// A candidate test scenario: `rows[r][c]` is the value of parameter `r`
/// for environment element `c`. All rows have the same column count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub rows: Vec<Vec<f64>>,
}

impl Scenario {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Column `c` as a vector, one entry per parameter row.
    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    pub fn swap_columns(&mut self, a: usize, b: usize) {
        for row in &mut self.rows {
            row.swap(a, b);
        }
    }

    pub fn satisfies(&self, specs: &[GeneSpec]) -> bool {
        self.rows.len() == specs.len()
            && self
                .rows
                .iter()
                .zip(specs)
                .all(|(row, spec)| row.iter().all(|&v| spec.contains(v)))
    }
}

/// On-disk form of a scenario: row-major matrix plus the parameter names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioDocument {
    pub header: Vec<String>,
    pub genes: Vec<Vec<f64>>,
}

impl ScenarioDocument {
    pub fn new(scenario: &Scenario, specs: &[GeneSpec]) -> Self {
        ScenarioDocument {
            header: specs.iter().map(|s| s.name.clone()).collect(),
            genes: scenario.rows.clone(),
        }
    }

    pub fn into_scenario(self) -> Scenario {
        Scenario { rows: self.genes }
    }
}

/// Draws a scenario with a uniform column count in `length_bounds` and
/// every entry uniform within its row's spec range.
pub fn sample<R: Rng + ?Sized>(
    specs: &[GeneSpec],
    length_bounds: (usize, usize),
    rng: &mut R,
) -> Result<Scenario, GenomeError> {
    if specs.is_empty() {
        return Err(GenomeError::EmptySpec);
    }
    for spec in specs {
        spec.validate()?;
    }
    let (min_cols, max_cols) = length_bounds;
    let n_cols = rng.random_range(min_cols..=max_cols);
    let rows = specs
        .iter()
        .map(|spec| (0..n_cols).map(|_| spec.sample_value(rng)).collect())
        .collect();
    Ok(Scenario { rows })
}

/// One-point crossover over columns, valid for variable-length parents.
/// The cut index is uniform in `[1, min_len - 1]` so both children keep at
/// least one column from each parent. Parents with fewer than 2 columns
/// are returned unchanged.
pub fn one_point_crossover<R: Rng + ?Sized>(
    a: &Scenario,
    b: &Scenario,
    rng: &mut R,
) -> (Scenario, Scenario) {
    let min_len = a.n_cols().min(b.n_cols());
    if min_len < 2 {
        return (a.clone(), b.clone());
    }
    let k = rng.random_range(1..min_len);
    let splice = |head: &Scenario, tail: &Scenario| Scenario {
        rows: head
            .rows
            .iter()
            .zip(&tail.rows)
            .map(|(h, t)| h[..k].iter().chain(&t[k..]).copied().collect())
            .collect(),
    };
    (splice(a, b), splice(b, a))
}

/// Exchange mutation: two distinct columns swap places.
pub fn mutate_exchange<R: Rng + ?Sized>(s: &Scenario, rng: &mut R) -> Scenario {
    let n = s.n_cols();
    if n < 2 {
        return s.clone();
    }
    let i = rng.random_range(0..n);
    let j = (i + rng.random_range(1..n)) % n;
    let mut out = s.clone();
    out.swap_columns(i, j);
    out
}

/// Change-of-variable mutation: one entry is resampled within its spec range.
pub fn mutate_change_variable<R: Rng + ?Sized>(s: &Scenario, specs: &[GeneSpec], rng: &mut R) -> Scenario {
    if s.n_cols() == 0 || s.n_rows() == 0 {
        return s.clone();
    }
    let row = rng.random_range(0..s.n_rows());
    let col = rng.random_range(0..s.n_cols());
    let mut out = s.clone();
    out.rows[row][col] = specs[row].sample_value(rng);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn specs() -> Vec<GeneSpec> {
        vec![
            GeneSpec::categorical("action", &["straight", "left", "right"]),
            GeneSpec::real("length", 5.0, 50.0),
            GeneSpec::real("angle", 5.0, 85.0),
        ]
    }

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn sample_respects_bounds_and_length() {
        let specs = specs();
        let mut r = rng(7);
        for _ in 0..1000 {
            let s = sample(&specs, (8, 15), &mut r).unwrap();
            assert!(s.n_cols() >= 8 && s.n_cols() <= 15);
            assert!(s.satisfies(&specs));
        }
    }

    #[test]
    fn sample_fixed_length() {
        let specs = specs();
        let mut r = rng(1);
        for _ in 0..50 {
            assert_eq!(sample(&specs, (8, 8), &mut r).unwrap().n_cols(), 8);
        }
    }

    #[test]
    fn sample_is_deterministic() {
        let specs = specs();
        let a = sample(&specs, (8, 15), &mut rng(42)).unwrap();
        let b = sample(&specs, (8, 15), &mut rng(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_empty_spec_fails() {
        assert!(matches!(
            sample(&[], (2, 4), &mut rng(0)),
            Err(GenomeError::EmptySpec)
        ));
    }

    #[test]
    fn crossover_known_cut() {
        // Single row so columns are scalars; force k = 2 by searching seeds.
        let a = Scenario {
            rows: vec![vec![1.0, 2.0, 3.0, 4.0]],
        };
        let b = Scenario {
            rows: vec![vec![10.0, 20.0, 30.0, 40.0]],
        };
        for seed in 0..50 {
            let mut r = rng(seed);
            let (c1, c2) = one_point_crossover(&a, &b, &mut r);
            let k = c1.rows[0]
                .iter()
                .position(|&v| v >= 10.0)
                .unwrap_or(c1.n_cols());
            assert!(k >= 1 && k <= 3);
            assert_eq!(&c1.rows[0][..k], &a.rows[0][..k]);
            assert_eq!(&c1.rows[0][k..], &b.rows[0][k..]);
            assert_eq!(&c2.rows[0][..k], &b.rows[0][..k]);
            assert_eq!(&c2.rows[0][k..], &a.rows[0][k..]);
        }
    }

    #[test]
    fn crossover_conserves_total_length() {
        let specs = specs();
        let mut r = rng(3);
        for _ in 0..500 {
            let a = sample(&specs, (3, 12), &mut r).unwrap();
            let b = sample(&specs, (3, 12), &mut r).unwrap();
            let (c1, c2) = one_point_crossover(&a, &b, &mut r);
            assert_eq!(c1.n_cols() + c2.n_cols(), a.n_cols() + b.n_cols());
            assert!(c1.satisfies(&specs) && c2.satisfies(&specs));
        }
    }

    #[test]
    fn crossover_identical_parents() {
        let specs = specs();
        let mut r = rng(9);
        let a = sample(&specs, (6, 6), &mut r).unwrap();
        let (c1, c2) = one_point_crossover(&a, &a, &mut r);
        assert_eq!(c1, a);
        assert_eq!(c2, a);
    }

    #[test]
    fn crossover_short_parent_unchanged() {
        let a = Scenario {
            rows: vec![vec![1.0]],
        };
        let b = Scenario {
            rows: vec![vec![2.0, 3.0]],
        };
        let (c1, c2) = one_point_crossover(&a, &b, &mut rng(0));
        assert_eq!(c1, a);
        assert_eq!(c2, b);
    }

    #[test]
    fn exchange_preserves_column_multiset() {
        let specs = specs();
        let mut r = rng(11);
        for _ in 0..1000 {
            let s = sample(&specs, (2, 10), &mut r).unwrap();
            let m = mutate_exchange(&s, &mut r);
            let mut before: Vec<Vec<u64>> = (0..s.n_cols())
                .map(|c| s.column(c).iter().map(|v| v.to_bits()).collect())
                .collect();
            let mut after: Vec<Vec<u64>> = (0..m.n_cols())
                .map(|c| m.column(c).iter().map(|v| v.to_bits()).collect())
                .collect();
            before.sort();
            after.sort();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn exchange_single_column_unchanged() {
        let s = Scenario {
            rows: vec![vec![1.0], vec![2.0]],
        };
        assert_eq!(mutate_exchange(&s, &mut rng(0)), s);
    }

    #[test]
    fn exchange_swaps_two_distinct_columns() {
        let s = Scenario {
            rows: vec![vec![1.0, 2.0, 3.0]],
        };
        let m = mutate_exchange(&s, &mut rng(5));
        let diff: Vec<usize> = (0..3).filter(|&c| s.rows[0][c] != m.rows[0][c]).collect();
        assert_eq!(diff.len(), 2);
    }

    #[test]
    fn change_variable_alters_at_most_one_entry() {
        let specs = specs();
        let mut r = rng(13);
        for _ in 0..1000 {
            let s = sample(&specs, (2, 10), &mut r).unwrap();
            let m = mutate_change_variable(&s, &specs, &mut r);
            let changed: usize = s
                .rows
                .iter()
                .zip(&m.rows)
                .map(|(a, b)| a.iter().zip(b).filter(|(x, y)| x != y).count())
                .sum();
            assert!(changed <= 1);
            assert!(m.satisfies(&specs));
        }
    }

    #[test]
    fn change_variable_is_deterministic() {
        let specs = specs();
        let s = sample(&specs, (6, 6), &mut rng(1)).unwrap();
        let a = mutate_change_variable(&s, &specs, &mut rng(2));
        let b = mutate_change_variable(&s, &specs, &mut rng(2));
        assert_eq!(a, b);
    }

    #[test]
    fn scenario_document_round_trip() {
        let specs = specs();
        let s = sample(&specs, (4, 9), &mut rng(21)).unwrap();
        let doc = ScenarioDocument::new(&s, &specs);
        let json = serde_json::to_string(&doc).unwrap();
        let back: ScenarioDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.header, vec!["action", "length", "angle"]);
        assert_eq!(back.into_scenario(), s);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn scenario_strategy() -> impl Strategy<Value = (Scenario, Scenario, u64)> {
            let col = (0..3i64, 5.0..50.0f64, 5.0..85.0f64);
            let cols = prop::collection::vec(col, 2..12);
            (cols.clone(), cols, any::<u64>()).prop_map(|(a, b, seed)| {
                let build = |cols: Vec<(i64, f64, f64)>| {
                    let mut rows = vec![vec![0.0; cols.len()]; 3];
                    for (c, (action, length, angle)) in cols.into_iter().enumerate() {
                        rows[0][c] = action as f64;
                        rows[1][c] = length;
                        rows[2][c] = angle;
                    }
                    Scenario { rows }
                };
                (build(a), build(b), seed)
            })
        }

        proptest! {
            #[test]
            fn crossover_swaps_length_multiset((a, b, seed) in scenario_strategy()) {
                let (c1, c2) = one_point_crossover(&a, &b, &mut rng(seed));
                let mut parents = [a.n_cols(), b.n_cols()];
                let mut children = [c1.n_cols(), c2.n_cols()];
                parents.sort();
                children.sort();
                prop_assert_eq!(parents, children);
                prop_assert_eq!(c1.n_rows(), a.n_rows());
            }

            #[test]
            fn crossover_entries_come_from_parents((a, b, seed) in scenario_strategy()) {
                let (c1, c2) = one_point_crossover(&a, &b, &mut rng(seed));
                for child in [&c1, &c2] {
                    for (row, values) in child.rows.iter().enumerate() {
                        for v in values {
                            prop_assert!(
                                a.rows[row].contains(v) || b.rows[row].contains(v),
                                "value {} not in either parent row {}", v, row
                            );
                        }
                    }
                }
            }

            #[test]
            fn mutations_stay_within_specs((a, _, seed) in scenario_strategy()) {
                let specs = specs();
                prop_assume!(a.satisfies(&specs));
                let mut r = rng(seed);
                prop_assert!(mutate_exchange(&a, &mut r).satisfies(&specs));
                prop_assert!(mutate_change_variable(&a, &specs, &mut r).satisfies(&specs));
            }
        }
    }
}
