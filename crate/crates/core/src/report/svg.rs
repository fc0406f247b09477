//! Hand-rolled SVG output: scenario images in the style of the built-in
//! problems (axes in meters) and the comparison charts.

use std::fmt::Write;

use crate::genome::Scenario;
use crate::lkas::LkasProblem;
use crate::robot::RobotProblem;

use super::RenderScenario;

const SERIES_COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// World-coordinate drawing surface with a margin, an axis frame and tick
/// labels. World y grows upwards; SVG y grows downwards.
pub struct Canvas {
    body: String,
    width: f64,
    height: f64,
    margin: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Canvas {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Canvas {
            body: String::new(),
            width: 560.0,
            height: 560.0,
            margin: 55.0,
            x_range,
            y_range,
        }
    }

    fn sx(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.margin + (x - lo) / (hi - lo).max(1e-12) * (self.width - 2.0 * self.margin)
    }

    fn sy(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.height - self.margin - (y - lo) / (hi - lo).max(1e-12) * (self.height - 2.0 * self.margin)
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], color: &str, width: f64) {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.sx(x), self.sy(y)))
            .collect();
        writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            coords.join(" "),
            color,
            width
        )
        .unwrap();
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let (sx, sy) = (self.sx(x), self.sy(y + h));
        let sw = self.sx(x + w) - sx;
        let sh = self.sy(y) - self.sy(y + h);
        writeln!(
            self.body,
            r#"<rect x="{sx:.2}" y="{sy:.2}" width="{sw:.2}" height="{sh:.2}" fill="{fill}"/>"#
        )
        .unwrap();
    }

    pub fn circle(&mut self, x: f64, y: f64, radius_px: f64, fill: &str) {
        writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{}" fill="{}"/>"#,
            self.sx(x),
            self.sy(y),
            radius_px,
            fill
        )
        .unwrap();
    }

    pub fn text(&mut self, x_px: f64, y_px: f64, size: f64, anchor: &str, content: &str) {
        writeln!(
            self.body,
            r#"<text x="{x_px:.2}" y="{y_px:.2}" font-size="{size}" font-family="sans-serif" text-anchor="{anchor}">{content}</text>"#
        )
        .unwrap();
    }

    /// Axis frame with 5 ticks per axis and optional axis titles.
    pub fn axes(&mut self, x_label: &str, y_label: &str) {
        let (m, w, h) = (self.margin, self.width, self.height);
        writeln!(
            self.body,
            r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            w - 2.0 * m,
            h - 2.0 * m
        )
        .unwrap();
        for i in 0..=4 {
            let t = i as f64 / 4.0;
            let xv = self.x_range.0 + t * (self.x_range.1 - self.x_range.0);
            let yv = self.y_range.0 + t * (self.y_range.1 - self.y_range.0);
            let (sx, sy) = (self.sx(xv), self.sy(yv));
            writeln!(self.body, r#"<line x1="{sx:.2}" y1="{}" x2="{sx:.2}" y2="{}" stroke="black"/>"#, h - m, h - m + 5.0).unwrap();
            self.text(sx, h - m + 18.0, 11.0, "middle", &format_tick(xv));
            writeln!(self.body, r#"<line x1="{}" y1="{sy:.2}" x2="{m}" y2="{sy:.2}" stroke="black"/>"#, m - 5.0).unwrap();
            self.text(m - 8.0, sy + 4.0, 11.0, "end", &format_tick(yv));
        }
        self.text(w / 2.0, h - 12.0, 13.0, "middle", x_label);
        writeln!(
            self.body,
            r#"<text x="14" y="{:.2}" font-size="13" font-family="sans-serif" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            y_label
        )
        .unwrap();
    }

    pub fn legend(&mut self, names: &[&str]) {
        for (i, name) in names.iter().enumerate() {
            let y = self.margin + 16.0 + 18.0 * i as f64;
            let x = self.width - self.margin - 130.0;
            writeln!(
                self.body,
                r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/>"#,
                x + 24.0,
                SERIES_COLORS[i % SERIES_COLORS.len()]
            )
            .unwrap();
            self.text(x + 30.0, y + 4.0, 12.0, "start", name);
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

fn format_tick(v: f64) -> String {
    if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else if (v - v.round()).abs() < 1e-9 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Offsets a polyline by `offset` along its left normal; used for lane edges.
fn offset_polyline(points: &[(f64, f64)], offset: f64) -> Vec<(f64, f64)> {
    points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let (a, b) = if i + 1 < points.len() {
                (points[i], points[i + 1])
            } else {
                (points[i - 1], points[i])
            };
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let len = (dx * dx + dy * dy).sqrt().max(1e-12);
            (x - dy / len * offset, y + dx / len * offset)
        })
        .collect()
}

impl RenderScenario for LkasProblem {
    fn render_svg(&self, s: &Scenario) -> String {
        let road = self.decode(s);
        let map = self.config().map_size;
        let mut canvas = Canvas::new((0.0, map), (0.0, map));
        let half = road.lane_width / 2.0;
        canvas.polyline(&offset_polyline(&road.points, half), "#444444", 1.5);
        canvas.polyline(&offset_polyline(&road.points, -half), "#444444", 1.5);
        canvas.polyline(&road.points, "#f2c200", 1.0);
        if let Some(&(x, y)) = road.points.first() {
            canvas.circle(x, y, 4.0, "#2ca02c");
        }
        if let Some(&(x, y)) = road.points.last() {
            canvas.circle(x, y, 4.0, "#d62728");
        }
        canvas.axes("x, m", "y, m");
        canvas.finish()
    }
}

impl RenderScenario for RobotProblem {
    fn render_svg(&self, s: &Scenario) -> String {
        let grid = self.decode(s);
        let res = grid.resolution;
        let (w_m, h_m) = (grid.width as f64 * res, grid.height as f64 * res);
        let mut canvas = Canvas::new((0.0, w_m), (0.0, h_m));
        for y in 0..grid.height {
            for x in 0..grid.width {
                if grid.is_obstacle(x, y) {
                    canvas.rect(x as f64 * res, y as f64 * res, res, res, "#333333");
                }
            }
        }
        let center = |c: (usize, usize)| ((c.0 as f64 + 0.5) * res, (c.1 as f64 + 0.5) * res);
        let (sx, sy) = center(grid.start);
        canvas.circle(sx, sy, 5.0, "#2ca02c");
        let (gx, gy) = center(grid.goal);
        canvas.circle(gx, gy, 5.0, "#d62728");
        canvas.axes("x, m", "y, m");
        canvas.finish()
    }
}

/// Convergence chart: one mean-best-fitness curve per algorithm name.
pub fn convergence_chart(series: &[(String, Vec<(u64, f64)>)]) -> String {
    let mut x_max = 1.0f64;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, points) in series {
        for &(x, y) in points {
            x_max = x_max.max(x as f64);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !y_min.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if y_min == y_max {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let mut canvas = Canvas::new((0.0, x_max), (y_min, y_max));
    for (i, (_, points)) in series.iter().enumerate() {
        let line: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x as f64, y)).collect();
        canvas.polyline(&line, SERIES_COLORS[i % SERIES_COLORS.len()], 2.0);
    }
    canvas.axes("evaluations", "best fitness");
    let names: Vec<&str> = series.iter().map(|(n, _)| n.as_str()).collect();
    canvas.legend(&names);
    canvas.finish()
}

/// Five-number summary used by the box plots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumbers {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Sort-based five-number summary with linear quantile interpolation.
pub fn five_number_summary(samples: &[f64]) -> FiveNumbers {
    assert!(!samples.is_empty());
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    };
    FiveNumbers {
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: *sorted.last().unwrap(),
    }
}

/// Box-and-whisker chart, one box per name.
pub fn box_chart(boxes: &[(String, FiveNumbers)], y_label: &str) -> String {
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, f) in boxes {
        y_min = y_min.min(f.min);
        y_max = y_max.max(f.max);
    }
    if y_min == y_max {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = 0.05 * (y_max - y_min);
    let n = boxes.len() as f64;
    let mut canvas = Canvas::new((0.0, n), (y_min - pad, y_max + pad));
    for (i, (name, f)) in boxes.iter().enumerate() {
        let cx = i as f64 + 0.5;
        let (bw, ww) = (0.3, 0.18);
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        // Whiskers.
        canvas.polyline(&[(cx, f.min), (cx, f.q1)], "black", 1.0);
        canvas.polyline(&[(cx, f.q3), (cx, f.max)], "black", 1.0);
        canvas.polyline(&[(cx - ww, f.min), (cx + ww, f.min)], "black", 1.0);
        canvas.polyline(&[(cx - ww, f.max), (cx + ww, f.max)], "black", 1.0);
        // Box and median.
        canvas.rect(cx - bw, f.q1, 2.0 * bw, (f.q3 - f.q1).max(1e-9), color);
        canvas.polyline(&[(cx - bw, f.median), (cx + bw, f.median)], "black", 2.0);
        let label_x = canvas.sx(cx);
        let label_y = canvas.sy(y_min - pad) + 18.0;
        canvas.text(label_x, label_y, 12.0, "middle", name);
    }
    canvas.axes("", y_label);
    canvas.finish()
}
