//! Best-effort SVG rendering of networks and braids. Presentation only; the
//! JSON exports are the contract.

use std::fmt::Write;

use crate::geom::C;
use crate::network::Network;

const WALL_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Canvas {
    body: String,
    scale: f64,
    radius: f64,
}

impl Canvas {
    fn new(radius: f64) -> Self {
        Canvas { body: String::new(), scale: 360.0 / radius, radius }
    }

    fn map(&self, z: C) -> (f64, f64) {
        (400.0 + z.re * self.scale, 400.0 - z.im * self.scale)
    }

    fn polyline(&mut self, pts: &[C], color: &str, width: f64, dashed: bool) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            if p.norm() > self.radius * 1.45 {
                continue;
            }
            let (x, y) = self.map(*p);
            let _ = write!(d, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, x, y);
        }
        let dash = if dashed { " stroke-dasharray=\"6,4\"" } else { "" };
        let _ = writeln!(
            self.body,
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2}\"{} />",
            d.trim_end(),
            color,
            width,
            dash
        );
    }

    fn cross_mark(&mut self, z: C, color: &str) {
        let (x, y) = self.map(z);
        let s = 6.0;
        let _ = writeln!(
            self.body,
            "<path d=\"M{:.1},{:.1} L{:.1},{:.1} M{:.1},{:.1} L{:.1},{:.1}\" stroke=\"{}\" stroke-width=\"2\"/>",
            x - s, y - s, x + s, y + s, x - s, y + s, x + s, y - s, color
        );
    }

    fn dot(&mut self, z: C, r: f64, color: &str) {
        let (x, y) = self.map(z);
        let _ = writeln!(self.body, "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"{:.1}\" fill=\"{}\"/>", x, y, r, color);
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n<rect width=\"800\" height=\"800\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

/// Walls colored by source pair, branch points as crosses, cuts dashed.
pub fn network_svg(network: &Network, chart_radius: f64, punctures: &[C], basepoints: &[C]) -> String {
    let mut cv = Canvas::new(chart_radius.min(4.0));
    for (i, w) in network.walls.iter().enumerate() {
        cv.polyline(&w.points, WALL_COLORS[i % WALL_COLORS.len()], 1.6, false);
    }
    for cut in &network.cuts {
        cv.polyline(&cut.path, "#444444", 1.2, true);
    }
    for bp in &network.branch_points {
        cv.cross_mark(bp.z, "#000000");
    }
    for j in &network.joints {
        cv.dot(j.z, 4.0, "#e377c2");
    }
    for p in punctures {
        cv.dot(*p, 4.0, "#7f7f7f");
    }
    for q in basepoints {
        cv.dot(*q, 3.0, "#17becf");
    }
    cv.finish()
}

/// Base braid over the network with event markers.
pub fn braid_svg(
    network: &Network,
    chart_radius: f64,
    strands: &[Vec<C>],
    event_points: &[C],
) -> String {
    let mut cv = Canvas::new(chart_radius.min(4.0));
    for (i, w) in network.walls.iter().enumerate() {
        cv.polyline(&w.points, WALL_COLORS[i % WALL_COLORS.len()], 0.9, false);
    }
    for cut in &network.cuts {
        cv.polyline(&cut.path, "#444444", 0.9, true);
    }
    for bp in &network.branch_points {
        cv.cross_mark(bp.z, "#000000");
    }
    for (i, s) in strands.iter().enumerate() {
        cv.polyline(s, WALL_COLORS[(i + 3) % WALL_COLORS.len()], 2.0, false);
    }
    for e in event_points {
        cv.dot(*e, 5.0, "#d62728");
    }
    cv.finish()
}
