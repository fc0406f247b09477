//! Road geometry: decoding gene matrices into centerline polylines and
//! checking map-bounds / self-intersection constraints.

use serde::{Deserialize, Serialize};

use crate::genome::Scenario;

/// Row indices of the LKAS scenario matrix.
pub const ROW_ACTION: usize = 0;
pub const ROW_LENGTH: usize = 1;
pub const ROW_ANGLE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoadAction {
    Straight,
    TurnLeft,
    TurnRight,
}

/// One decoded scenario column: a road-building step.
#[derive(Debug, Clone, Copy)]
pub struct RoadGene {
    pub action: RoadAction,
    /// Straight: segment length in meters. Turns: arc angle in degrees.
    pub value: f64,
}

pub fn decode_genes(s: &Scenario) -> Vec<RoadGene> {
    (0..s.n_cols())
        .map(|c| {
            let action = match s.rows[ROW_ACTION][c] as i64 {
                0 => RoadAction::Straight,
                1 => RoadAction::TurnLeft,
                _ => RoadAction::TurnRight,
            };
            let value = match action {
                RoadAction::Straight => s.rows[ROW_LENGTH][c],
                _ => s.rows[ROW_ANGLE][c],
            };
            RoadGene { action, value }
        })
        .collect()
}

/// Geometry parameters for turning a gene sequence into a centerline.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RoadParams {
    pub map_size: f64,
    pub lane_width: f64,
    pub turn_radius: f64,
    /// Arc-length spacing of emitted centerline points, meters.
    pub step: f64,
    /// Anchor point of the road start.
    pub start: (f64, f64),
    /// Initial heading in degrees, counterclockwise from +x.
    pub heading_deg: f64,
}

impl Default for RoadParams {
    fn default() -> Self {
        RoadParams {
            map_size: 200.0,
            lane_width: 4.0,
            turn_radius: 15.0,
            step: 1.0,
            start: (100.0, 4.0),
            heading_deg: 90.0,
        }
    }
}

/// Interpolated 2D road centerline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadPolyline {
    pub points: Vec<(f64, f64)>,
    pub lane_width: f64,
}

impl RoadPolyline {
    pub fn arc_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
            .sum()
    }
}

/// Builds the centerline by walking the gene sequence from the anchor:
/// straights extend along the current heading, turns follow a circular
/// arc of fixed radius. Points are emitted every `params.step` meters of
/// arc length, plus the exact endpoint of each piece.
pub fn decode_road(s: &Scenario, params: &RoadParams) -> RoadPolyline {
    let mut points = vec![params.start];
    let mut pos = params.start;
    let mut heading = params.heading_deg.to_radians();
    for gene in decode_genes(s) {
        match gene.action {
            RoadAction::Straight => {
                let length = gene.value;
                let (dx, dy) = (heading.cos(), heading.sin());
                let mut travelled = params.step;
                while travelled < length {
                    points.push((pos.0 + dx * travelled, pos.1 + dy * travelled));
                    travelled += params.step;
                }
                pos = (pos.0 + dx * length, pos.1 + dy * length);
                points.push(pos);
            }
            RoadAction::TurnLeft | RoadAction::TurnRight => {
                let sign = if gene.action == RoadAction::TurnLeft { 1.0 } else { -1.0 };
                let radius = params.turn_radius;
                let center = (
                    pos.0 - sign * radius * heading.sin(),
                    pos.1 + sign * radius * heading.cos(),
                );
                // Angle from the arc center to the current position.
                let a0 = heading - sign * std::f64::consts::FRAC_PI_2;
                let sweep = gene.value.to_radians();
                let d_phi = params.step / radius;
                let mut phi = d_phi;
                while phi < sweep {
                    let a = a0 + sign * phi;
                    points.push((center.0 + radius * a.cos(), center.1 + radius * a.sin()));
                    phi += d_phi;
                }
                let a = a0 + sign * sweep;
                pos = (center.0 + radius * a.cos(), center.1 + radius * a.sin());
                points.push(pos);
                heading += sign * sweep;
            }
        }
    }
    dedup_close_points(&mut points, params.step * 1e-6);
    RoadPolyline { points, lane_width: params.lane_width }
}

fn dedup_close_points(points: &mut Vec<(f64, f64)>, eps: f64) {
    points.dedup_by(|b, a| ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt() < eps);
}

fn segments_intersect(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Counts crossings between non-adjacent centerline segments using a
/// uniform spatial hash to avoid the quadratic pair scan.
pub fn count_self_intersections(road: &RoadPolyline) -> usize {
    let n = road.points.len();
    if n < 4 {
        return 0;
    }
    let cell = 5.0f64;
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    for i in 0..n - 1 {
        let (p, q) = (road.points[i], road.points[i + 1]);
        let (kx0, ky0) = key(p.0.min(q.0), p.1.min(q.1));
        let (kx1, ky1) = key(p.0.max(q.0), p.1.max(q.1));
        for kx in kx0..=kx1 {
            for ky in ky0..=ky1 {
                buckets.entry((kx, ky)).or_default().push(i);
            }
        }
    }
    let mut crossings = std::collections::HashSet::new();
    for segs in buckets.values() {
        for (a, &i) in segs.iter().enumerate() {
            for &j in &segs[a + 1..] {
                let (lo, hi) = (i.min(j), i.max(j));
                if hi - lo <= 1 {
                    continue;
                }
                if segments_intersect(
                    road.points[lo],
                    road.points[lo + 1],
                    road.points[hi],
                    road.points[hi + 1],
                ) {
                    crossings.insert((lo, hi));
                }
            }
        }
    }
    crossings.len()
}

/// Constraint violation of a decoded road: 0 iff every centerline point
/// stays inside the map with a half-lane margin and no two non-adjacent
/// segments cross. Out-of-bounds violations scale with the worst
/// overshoot distance; each crossing adds 1.
pub fn validate_road(road: &RoadPolyline, map_size: f64) -> f64 {
    let margin = road.lane_width / 2.0;
    let (lo, hi) = (margin, map_size - margin);
    let mut worst_overshoot = 0.0f64;
    for &(x, y) in &road.points {
        for v in [x, y] {
            if v < lo {
                worst_overshoot = worst_overshoot.max(lo - v);
            } else if v > hi {
                worst_overshoot = worst_overshoot.max(v - hi);
            }
        }
    }
    worst_overshoot + count_self_intersections(road) as f64
}

/// The artifact handed to a simulator pipeline: centerline points plus
/// lane width.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoadDocument {
    pub points: Vec<(f64, f64)>,
    pub lane_width: f64,
}

impl From<&RoadPolyline> for RoadDocument {
    fn from(road: &RoadPolyline) -> Self {
        RoadDocument { points: road.points.clone(), lane_width: road.lane_width }
    }
}
