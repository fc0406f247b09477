//! Simplified vehicle model: a kinematic bicycle driven by a pure-pursuit
//! steering controller with a curvature-dependent target speed. The
//! fitness of a road scenario is the maximum deviation of the vehicle
//! from the lane center while driving it.

use serde::{Deserialize, Serialize};

use super::road::RoadPolyline;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleParams {
    pub wheelbase: f64,
    pub max_steer_deg: f64,
    pub lookahead: f64,
    /// 70 km/h.
    pub max_speed: f64,
    pub max_accel: f64,
    /// Lateral acceleration limit used to slow down for curves.
    pub max_lat_accel: f64,
    pub dt: f64,
    pub step_cap: usize,
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams {
            wheelbase: 2.5,
            max_steer_deg: 35.0,
            lookahead: 6.0,
            max_speed: 19.4,
            max_accel: 4.0,
            max_lat_accel: 6.0,
            dt: 0.1,
            step_cap: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VehicleState {
    pub position: (f64, f64),
    pub heading: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SimOutcome {
    /// Maximum perpendicular distance from the lane center, meters.
    pub max_deviation: f64,
    /// Step cap reached before covering 90% of the road arc length.
    pub truncated: bool,
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let ab = (b.0 - a.0, b.1 - a.1);
    let len2 = ab.0 * ab.0 + ab.1 * ab.1;
    if len2 == 0.0 {
        return dist2(p, a).sqrt();
    }
    let t = (((p.0 - a.0) * ab.0 + (p.1 - a.1) * ab.1) / len2).clamp(0.0, 1.0);
    dist2(p, (a.0 + t * ab.0, a.1 + t * ab.1)).sqrt()
}

/// Centerline with precomputed cumulative arc length.
struct Track<'a> {
    points: &'a [(f64, f64)],
    cum_len: Vec<f64>,
}

impl<'a> Track<'a> {
    fn new(road: &'a RoadPolyline) -> Self {
        let mut cum_len = Vec::with_capacity(road.points.len());
        let mut total = 0.0;
        cum_len.push(0.0);
        for w in road.points.windows(2) {
            total += dist2(w[0], w[1]).sqrt();
            cum_len.push(total);
        }
        Track { points: &road.points, cum_len }
    }

    fn total_length(&self) -> f64 {
        *self.cum_len.last().unwrap()
    }

    /// Nearest vertex at or after `from`, searched in a forward window so
    /// the matched position never jumps backwards on loops.
    fn nearest_index(&self, p: (f64, f64), from: usize) -> usize {
        let window_end = (from + 60).min(self.points.len());
        let mut best = from;
        let mut best_d = f64::INFINITY;
        for (i, &q) in self.points.iter().enumerate().take(window_end).skip(from) {
            let d = dist2(p, q);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Perpendicular distance to the centerline near vertex `idx`.
    fn deviation(&self, p: (f64, f64), idx: usize) -> f64 {
        let lo = idx.saturating_sub(1);
        let hi = (idx + 1).min(self.points.len() - 1);
        (lo..hi)
            .map(|i| point_segment_distance(p, self.points[i], self.points[i + 1]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point at arc length `target` ahead of vertex `idx`.
    fn point_ahead(&self, idx: usize, target: f64) -> (f64, f64) {
        let goal = self.cum_len[idx] + target;
        let mut i = idx;
        while i + 1 < self.points.len() && self.cum_len[i + 1] < goal {
            i += 1;
        }
        if i + 1 == self.points.len() {
            return *self.points.last().unwrap();
        }
        let seg = self.cum_len[i + 1] - self.cum_len[i];
        let t = if seg > 0.0 { (goal - self.cum_len[i]) / seg } else { 0.0 };
        let (a, b) = (self.points[i], self.points[i + 1]);
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    }

    /// Average curvature of the window `[idx, idx + span]` (arc length),
    /// from the heading change between its first and last segments.
    fn curvature_ahead(&self, idx: usize, span: f64) -> f64 {
        let goal = self.cum_len[idx] + span;
        let mut j = idx;
        while j + 1 < self.points.len() && self.cum_len[j + 1] < goal {
            j += 1;
        }
        if j <= idx || j + 1 >= self.points.len() {
            return 0.0;
        }
        let h0 = segment_heading(self.points[idx], self.points[idx + 1]);
        let h1 = segment_heading(self.points[j], self.points[j + 1]);
        let mut dh = h1 - h0;
        while dh > std::f64::consts::PI {
            dh -= 2.0 * std::f64::consts::PI;
        }
        while dh < -std::f64::consts::PI {
            dh += 2.0 * std::f64::consts::PI;
        }
        let ds = self.cum_len[j] - self.cum_len[idx];
        if ds > 0.0 {
            (dh / ds).abs()
        } else {
            0.0
        }
    }
}

fn segment_heading(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1).atan2(b.0 - a.0)
}

/// Drives the road from start to end (or the step cap) and returns the
/// maximum deviation from the lane center. Deterministic for a fixed road.
pub fn simulate_deviation(road: &RoadPolyline, params: &VehicleParams) -> SimOutcome {
    let track = Track::new(road);
    let n = track.points.len();
    if n < 2 {
        return SimOutcome { max_deviation: 0.0, truncated: false };
    }
    let max_steer = params.max_steer_deg.to_radians();
    let mut state = VehicleState {
        position: track.points[0],
        heading: segment_heading(track.points[0], track.points[1]),
        speed: 0.0,
    };
    let mut nearest = 0usize;
    let mut max_deviation = 0.0f64;
    let mut finished = false;

    for _ in 0..params.step_cap {
        nearest = track.nearest_index(state.position, nearest);

        // Done once the matched point is at the road end; checked before
        // the deviation update so overshoot past the endpoint does not
        // count as lateral error.
        if track.total_length() - track.cum_len[nearest] < 1e-9
            || (nearest + 1 == n && dist2(state.position, track.points[n - 1]).sqrt() < 1.0)
        {
            finished = true;
            break;
        }
        max_deviation = max_deviation.max(track.deviation(state.position, nearest));

        // Pure pursuit steering towards the lookahead point.
        let target = track.point_ahead(nearest, params.lookahead);
        let to_target = (target.0 - state.position.0, target.1 - state.position.1);
        let ld = (to_target.0 * to_target.0 + to_target.1 * to_target.1).sqrt().max(1e-6);
        let alpha = to_target.1.atan2(to_target.0) - state.heading;
        let steer =
            (2.0 * params.wheelbase * alpha.sin() / ld).atan().clamp(-max_steer, max_steer);

        // Slow down for upcoming curvature.
        let kappa = track.curvature_ahead(nearest, params.lookahead + 4.0);
        let v_target = if kappa > 1e-6 {
            (params.max_lat_accel / kappa).sqrt().min(params.max_speed)
        } else {
            params.max_speed
        };
        let dv = (v_target - state.speed).clamp(-params.max_accel * params.dt, params.max_accel * params.dt);
        state.speed = (state.speed + dv).clamp(0.0, params.max_speed);

        state.heading += state.speed / params.wheelbase * steer.tan() * params.dt;
        state.position.0 += state.speed * state.heading.cos() * params.dt;
        state.position.1 += state.speed * state.heading.sin() * params.dt;
    }

    let progress = track.cum_len[nearest] / track.total_length();
    SimOutcome { max_deviation, truncated: !finished && progress < 0.9 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::Scenario;
    use crate::lkas::road::{decode_road, RoadParams, ROW_ACTION, ROW_ANGLE, ROW_LENGTH};

    fn road_from(genes: &[(i64, f64)], start: (f64, f64), heading_deg: f64) -> RoadPolyline {
        let mut rows = vec![vec![0.0; genes.len()]; 3];
        for (c, &(action, value)) in genes.iter().enumerate() {
            rows[ROW_ACTION][c] = action as f64;
            rows[ROW_LENGTH][c] = if action == 0 { value } else { 25.0 };
            rows[ROW_ANGLE][c] = if action == 0 { 45.0 } else { value };
        }
        let params = RoadParams { start, heading_deg, ..RoadParams::default() };
        decode_road(&Scenario { rows }, &params)
    }

    #[test]
    fn straight_road_tracked_tightly() {
        for length in [10.0, 50.0, 120.0] {
            let road = road_from(&[(0, length)], (0.0, 0.0), 90.0);
            let out = simulate_deviation(&road, &VehicleParams::default());
            assert!(out.max_deviation < 0.2, "deviation {}", out.max_deviation);
            assert!(!out.truncated);
        }
    }

    #[test]
    fn sharp_turn_deviates_more_than_straight() {
        let straight = road_from(&[(0, 50.0)], (0.0, 0.0), 90.0);
        let curvy = road_from(&[(0, 20.0), (1, 85.0), (0, 20.0)], (0.0, 0.0), 90.0);
        let p = VehicleParams::default();
        let d_straight = simulate_deviation(&straight, &p).max_deviation;
        let d_curvy = simulate_deviation(&curvy, &p).max_deviation;
        assert!(d_curvy > d_straight, "curvy {} vs straight {}", d_curvy, d_straight);
    }

    #[test]
    fn simulation_is_deterministic() {
        let road = road_from(&[(0, 15.0), (2, 60.0), (0, 25.0)], (10.0, 10.0), 45.0);
        let p = VehicleParams::default();
        let a = simulate_deviation(&road, &p).max_deviation;
        let b = simulate_deviation(&road, &p).max_deviation;
        assert_eq!(a, b);
    }

    #[test]
    fn deviation_invariant_under_rigid_motion() {
        let genes = [(0i64, 20.0), (1i64, 70.0), (0i64, 30.0), (2i64, 40.0)];
        let p = VehicleParams::default();
        let base = simulate_deviation(&road_from(&genes, (0.0, 0.0), 90.0), &p).max_deviation;
        let moved = simulate_deviation(&road_from(&genes, (37.0, -12.0), 213.0), &p).max_deviation;
        assert!((base - moved).abs() < 1e-6, "base {} moved {}", base, moved);
    }

    #[test]
    fn short_cap_truncates_long_road() {
        let road = road_from(&[(0, 120.0), (0, 120.0), (0, 120.0)], (0.0, 0.0), 90.0);
        let params = VehicleParams { step_cap: 20, ..VehicleParams::default() };
        let out = simulate_deviation(&road, &params);
        assert!(out.truncated);
    }
}
