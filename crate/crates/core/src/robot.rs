//! Autonomous-robot test problem: scenarios decode into occupancy grids,
//! fitness is the shortest-path length from start to goal. Longer paths
//! mean harder maps, so the search is pushed towards maps that stress the
//! planner; maps with no path at all are constraint violations.

use serde::{Deserialize, Serialize};

use crate::engine::{Evaluation, Problem};
use crate::genome::{GeneSpec, Scenario};

/// Row indices of the robot scenario matrix.
pub const ROW_ORIENTATION: usize = 0;
pub const ROW_POSITION: usize = 1;
pub const ROW_LENGTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallOrientation {
    Horizontal,
    Vertical,
}

/// One decoded scenario column: a wall in the room.
#[derive(Debug, Clone, Copy)]
pub struct ObstacleGene {
    pub orientation: WallOrientation,
    pub position: usize,
    pub length: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobotConfig {
    pub width: usize,
    pub height: usize,
    /// Meters per cell.
    pub resolution: f64,
    pub min_cols: usize,
    pub max_cols: usize,
    pub wall_min_len: usize,
    pub wall_max_len: usize,
}

impl Default for RobotConfig {
    fn default() -> Self {
        RobotConfig {
            width: 40,
            height: 40,
            resolution: 0.25,
            min_cols: 10,
            max_cols: 25,
            wall_min_len: 2,
            wall_max_len: 36,
        }
    }
}

/// Boolean obstacle map of a closed room with a start and goal cell.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    cells: Vec<bool>,
    pub start: (usize, usize),
    pub goal: (usize, usize),
}

impl OccupancyGrid {
    pub fn is_obstacle(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    fn set_obstacle(&mut self, x: usize, y: usize) {
        if (x, y) != self.start && (x, y) != self.goal {
            self.cells[y * self.width + x] = true;
        }
    }

    /// Interior obstacle cells (border excluded), in row-major order.
    pub fn interior_obstacles(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for y in 1..self.height - 1 {
            for x in 1..self.width - 1 {
                if self.is_obstacle(x, y) {
                    cells.push((x, y));
                }
            }
        }
        cells
    }
}

pub fn decode_genes(s: &Scenario) -> Vec<ObstacleGene> {
    (0..s.n_cols())
        .map(|c| ObstacleGene {
            orientation: if s.rows[ROW_ORIENTATION][c] as i64 == 0 {
                WallOrientation::Horizontal
            } else {
                WallOrientation::Vertical
            },
            position: s.rows[ROW_POSITION][c] as usize,
            length: s.rows[ROW_LENGTH][c] as usize,
        })
        .collect()
}

/// Rasterizes the gene walls into a bordered grid. Even-indexed genes
/// anchor at the left (horizontal) or top (vertical) edge, odd-indexed
/// ones at the opposite edge, so consecutive walls form winding
/// corridors; cells covering the start or goal are clipped.
pub fn decode_grid(s: &Scenario, config: &RobotConfig) -> OccupancyGrid {
    let (w, h) = (config.width, config.height);
    let mut grid = OccupancyGrid {
        width: w,
        height: h,
        resolution: config.resolution,
        cells: vec![false; w * h],
        start: (1, 1),
        goal: (w - 2, h - 2),
    };
    for x in 0..w {
        grid.cells[x] = true;
        grid.cells[(h - 1) * w + x] = true;
    }
    for y in 0..h {
        grid.cells[y * w] = true;
        grid.cells[y * w + w - 1] = true;
    }
    for (index, gene) in decode_genes(s).into_iter().enumerate() {
        let from_near_edge = index % 2 == 0;
        match gene.orientation {
            WallOrientation::Horizontal => {
                let y = gene.position.clamp(1, h - 2);
                let len = gene.length.min(w - 2);
                let xs = if from_near_edge { 1..=len } else { (w - 1 - len)..=(w - 2) };
                for x in xs {
                    grid.set_obstacle(x, y);
                }
            }
            WallOrientation::Vertical => {
                let x = gene.position.clamp(1, w - 2);
                let len = gene.length.min(h - 2);
                let ys = if from_near_edge { 1..=len } else { (h - 1 - len)..=(h - 2) };
                for y in ys {
                    grid.set_obstacle(x, y);
                }
            }
        }
    }
    grid
}

/// A* over the 4-connected grid with a Manhattan heuristic. Returns the
/// number of steps of a shortest path, or None when the goal is
/// unreachable. The heuristic is admissible, so the result equals the
/// true grid distance.
pub fn plan_path(grid: &OccupancyGrid) -> Option<usize> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let (w, h) = (grid.width, grid.height);
    let index = |x: usize, y: usize| y * w + x;
    let manhattan = |x: usize, y: usize| {
        grid.goal.0.abs_diff(x) + grid.goal.1.abs_diff(y)
    };
    let mut dist = vec![usize::MAX; w * h];
    let mut heap = BinaryHeap::new();
    dist[index(grid.start.0, grid.start.1)] = 0;
    heap.push(Reverse((manhattan(grid.start.0, grid.start.1), index(grid.start.0, grid.start.1))));
    while let Some(Reverse((f, idx))) = heap.pop() {
        let (x, y) = (idx % w, idx / w);
        let g = dist[idx];
        if f != g + manhattan(x, y) {
            continue; // stale entry
        }
        if (x, y) == grid.goal {
            return Some(g);
        }
        let neighbors = [
            (x.wrapping_sub(1), y),
            (x + 1, y),
            (x, y.wrapping_sub(1)),
            (x, y + 1),
        ];
        for (nx, ny) in neighbors {
            if nx >= w || ny >= h || grid.is_obstacle(nx, ny) {
                continue;
            }
            let nidx = index(nx, ny);
            if g + 1 < dist[nidx] {
                dist[nidx] = g + 1;
                heap.push(Reverse((g + 1 + manhattan(nx, ny), nidx)));
            }
        }
    }
    None
}

/// Path length in meters, or None when no path exists.
pub fn plan_path_length(grid: &OccupancyGrid) -> Option<f64> {
    plan_path(grid).map(|steps| steps as f64 * grid.resolution)
}

/// Jaccard distance between the interior obstacle cell sets of two
/// scenarios; 0 when both maps are empty.
pub fn robot_novelty(a: &Scenario, b: &Scenario, config: &RobotConfig) -> f64 {
    let cells_a = decode_grid(a, config).interior_obstacles();
    let cells_b = decode_grid(b, config).interior_obstacles();
    if cells_a.is_empty() && cells_b.is_empty() {
        return 0.0;
    }
    let set_a: std::collections::HashSet<_> = cells_a.into_iter().collect();
    let set_b: std::collections::HashSet<_> = cells_b.into_iter().collect();
    let intersection = set_a.intersection(&set_b).count();
    let union = set_a.union(&set_b).count();
    1.0 - intersection as f64 / union as f64
}

pub struct RobotProblem {
    config: RobotConfig,
    specs: Vec<GeneSpec>,
}

impl RobotProblem {
    pub fn new(config: RobotConfig) -> Self {
        let specs = vec![
            GeneSpec::categorical("orientation", &["horizontal", "vertical"]),
            GeneSpec::integer("position", 1, (config.width.max(config.height) - 2) as i64),
            GeneSpec::integer("length", config.wall_min_len as i64, config.wall_max_len as i64),
        ];
        RobotProblem { config, specs }
    }

    pub fn config(&self) -> &RobotConfig {
        &self.config
    }

    pub fn decode(&self, s: &Scenario) -> OccupancyGrid {
        decode_grid(s, &self.config)
    }
}

impl Default for RobotProblem {
    fn default() -> Self {
        RobotProblem::new(RobotConfig::default())
    }
}

impl Problem for RobotProblem {
    fn gene_specs(&self) -> &[GeneSpec] {
        &self.specs
    }

    fn length_bounds(&self) -> (usize, usize) {
        (self.config.min_cols, self.config.max_cols)
    }

    fn evaluate_fitness(&self, s: &Scenario) -> f64 {
        plan_path_length(&self.decode(s)).unwrap_or(0.0)
    }

    fn validate(&self, s: &Scenario) -> f64 {
        if plan_path(&self.decode(s)).is_some() {
            0.0
        } else {
            1.0
        }
    }

    fn novelty(&self, a: &Scenario, b: &Scenario) -> f64 {
        robot_novelty(a, b, &self.config)
    }

    fn evaluate(&self, s: &Scenario) -> Evaluation {
        match plan_path_length(&self.decode(s)) {
            Some(length) => {
                Evaluation { fitness: length, constraint_violation: 0.0, truncated: false }
            }
            None => Evaluation { fitness: 0.0, constraint_violation: 1.0, truncated: false },
        }
    }
}

/// Run-length encoded grid export: the decoded artifact a downstream
/// simulator would consume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDocument {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    /// Per row: (first column, run length) for each obstacle run.
    pub rows: Vec<Vec<(usize, usize)>>,
}

impl From<&OccupancyGrid> for GridDocument {
    fn from(grid: &OccupancyGrid) -> Self {
        let mut rows = Vec::with_capacity(grid.height);
        for y in 0..grid.height {
            let mut runs = Vec::new();
            let mut x = 0;
            while x < grid.width {
                if grid.is_obstacle(x, y) {
                    let begin = x;
                    while x < grid.width && grid.is_obstacle(x, y) {
                        x += 1;
                    }
                    runs.push((begin, x - begin));
                } else {
                    x += 1;
                }
            }
            rows.push(runs);
        }
        GridDocument {
            width: grid.width,
            height: grid.height,
            resolution: grid.resolution,
            start: grid.start,
            goal: grid.goal,
            rows,
        }
    }
}
