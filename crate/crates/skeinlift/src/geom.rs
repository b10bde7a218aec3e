//! Planar primitives shared by the tracer and the braid engine.
//!
//! Everything downstream leans on exact piecewise-linear predicates over f64,
//! so the helpers here are deliberately branch-explicit.

use num_complex::Complex64;

pub type C = Complex64;

/// 2D cross product (z-component of the wedge).
#[inline]
pub fn cross(a: C, b: C) -> f64 {
    a.re * b.im - a.im * b.re
}

#[inline]
pub fn unit(v: C) -> C {
    let n = v.norm();
    if n == 0.0 {
        C::new(1.0, 0.0)
    } else {
        v / n
    }
}

/// A path sampled at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedPath {
    pub pts: Vec<(f64, C)>,
}

impl TimedPath {
    pub fn new(pts: Vec<(f64, C)>) -> Self {
        TimedPath { pts }
    }

    pub fn from_points(points: &[C], t0: f64, t1: f64) -> Self {
        let n = points.len();
        assert!(n >= 2 || (n == 1 && t0 == t1));
        if n == 1 {
            return TimedPath { pts: vec![(t0, points[0]), (t1, points[0])] };
        }
        // parametrize by arc length so crossing times track geometry
        let mut acc = vec![0.0];
        for w in points.windows(2) {
            acc.push(acc.last().unwrap() + (w[1] - w[0]).norm());
        }
        let total = *acc.last().unwrap();
        let pts = points
            .iter()
            .zip(acc.iter())
            .map(|(p, a)| {
                let frac = if total > 0.0 { a / total } else { 0.0 };
                (t0 + (t1 - t0) * frac, *p)
            })
            .collect();
        TimedPath { pts }
    }

    pub fn constant(z: C, t0: f64, t1: f64) -> Self {
        TimedPath { pts: vec![(t0, z), (t1, z)] }
    }

    pub fn start(&self) -> C {
        self.pts.first().unwrap().1
    }

    pub fn end(&self) -> C {
        self.pts.last().unwrap().1
    }

    pub fn t_start(&self) -> f64 {
        self.pts.first().unwrap().0
    }

    pub fn t_end(&self) -> f64 {
        self.pts.last().unwrap().0
    }

    pub fn at(&self, t: f64) -> C {
        let pts = &self.pts;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        if t >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let idx = match pts.binary_search_by(|(tt, _)| tt.partial_cmp(&t).unwrap()) {
            Ok(i) => return pts[i].1,
            Err(i) => i,
        };
        let (ta, a) = pts[idx - 1];
        let (tb, b) = pts[idx];
        if tb == ta {
            return b;
        }
        let s = (t - ta) / (tb - ta);
        a + (b - a) * s
    }

    /// Velocity on the segment containing t (right-continuous).
    pub fn velocity_after(&self, t: f64) -> C {
        for w in self.pts.windows(2) {
            let (ta, a) = w[0];
            let (tb, b) = w[1];
            if t < tb || (t <= tb && tb == self.pts.last().unwrap().0) {
                if tb > ta {
                    return (b - a) / (tb - ta);
                }
            }
        }
        C::new(0.0, 0.0)
    }

    /// Shift all times by dt.
    pub fn shifted(&self, dt: f64) -> Self {
        TimedPath { pts: self.pts.iter().map(|(t, z)| (t + dt, *z)).collect() }
    }

    /// Prefix of the path up to time t (inclusive sample at t).
    pub fn prefix(&self, t: f64) -> Vec<(f64, C)> {
        let mut out: Vec<(f64, C)> = self.pts.iter().cloned().filter(|(tt, _)| *tt < t).collect();
        out.push((t, self.at(t)));
        out
    }

    /// Suffix of the path from time t (inclusive sample at t).
    pub fn suffix(&self, t: f64) -> Vec<(f64, C)> {
        let mut out = vec![(t, self.at(t))];
        out.extend(self.pts.iter().cloned().filter(|(tt, _)| *tt > t));
        out
    }

    pub fn arc_length(&self) -> f64 {
        self.pts.windows(2).map(|w| (w[1].1 - w[0].1).norm()).sum()
    }
}

/// Intersection of segments [p0,p1] and [q0,q1], interior-transversal only.
/// Returns (s, t, point) with s, t in (0,1).
pub fn seg_seg(p0: C, p1: C, q0: C, q1: C) -> Option<(f64, f64, C)> {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let den = cross(d1, d2);
    if den.abs() < 1e-300 {
        return None;
    }
    let w = q0 - p0;
    let s = cross(w, d2) / den;
    let t = cross(w, d1) / den;
    let eps = 1e-12;
    if s > eps && s < 1.0 - eps && t > eps && t < 1.0 - eps {
        Some((s, t, p0 + d1 * s))
    } else {
        None
    }
}

/// Like `seg_seg` but half-open on both ([0,1) x [0,1)), for chained polylines.
pub fn seg_seg_halfopen(p0: C, p1: C, q0: C, q1: C) -> Option<(f64, f64, C)> {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let den = cross(d1, d2);
    if den.abs() < 1e-300 {
        return None;
    }
    let w = q0 - p0;
    let s = cross(w, d2) / den;
    let t = cross(w, d1) / den;
    if (0.0..1.0).contains(&s) && (0.0..1.0).contains(&t) {
        Some((s, t, p0 + d1 * s))
    } else {
        None
    }
}

/// Crossing of segment [a,b] with the ray {origin + u*dir, u > u_min}.
/// Returns (s in [0,1), u, sign) where sign = sgn(cross(dir, b-a)).
pub fn seg_ray(a: C, b: C, origin: C, dir: C, u_min: f64) -> Option<(f64, f64, i8)> {
    let d = b - a;
    let den = cross(dir, d);
    if den.abs() < 1e-300 {
        return None;
    }
    let w = a - origin;
    // a + s d = origin + u dir
    let s = cross(dir, -w) / den;
    let u = cross(d, -w) / den;
    if (0.0..1.0).contains(&s) && u > u_min {
        Some((s, u, if den > 0.0 { 1 } else { -1 }))
    } else {
        None
    }
}

/// All polyline/polyline transversal intersections (interior of segments).
pub fn polyline_intersections(p: &[C], q: &[C]) -> Vec<(C, f64, f64)> {
    let mut out = Vec::new();
    let mut pa = 0.0;
    for i in 0..p.len().saturating_sub(1) {
        let mut qa = 0.0;
        for j in 0..q.len().saturating_sub(1) {
            if let Some((s, t, z)) = seg_seg(p[i], p[i + 1], q[j], q[j + 1]) {
                out.push((z, pa + s, qa + t));
            }
            qa += 1.0;
        }
        pa += 1.0;
    }
    out
}

pub fn polyline_min_dist(p: &[C], q: &[C]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..p.len().saturating_sub(1).max(1) {
        let (a, b) = if p.len() == 1 { (p[0], p[0]) } else { (p[i], p[i + 1]) };
        for j in 0..q.len().saturating_sub(1).max(1) {
            let (c, d) = if q.len() == 1 { (q[0], q[0]) } else { (q[j], q[j + 1]) };
            best = best.min(seg_seg_dist(a, b, c, d));
        }
        if p.len() == 1 {
            break;
        }
    }
    best
}

pub fn point_seg_dist(p: C, a: C, b: C) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * d.re + (p - a).im * d.im) / l2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

fn seg_seg_dist(a: C, b: C, c: C, d: C) -> f64 {
    if seg_seg(a, b, c, d).is_some() {
        return 0.0;
    }
    point_seg_dist(a, c, d)
        .min(point_seg_dist(b, c, d))
        .min(point_seg_dist(c, a, b))
        .min(point_seg_dist(d, a, b))
}

pub fn point_polyline_dist(p: C, poly: &[C]) -> f64 {
    if poly.len() == 1 {
        return (p - poly[0]).norm();
    }
    let mut best = f64::INFINITY;
    for w in poly.windows(2) {
        best = best.min(point_seg_dist(p, w[0], w[1]));
    }
    best
}

/// Polyline offset to one side (+1 = left of travel direction), vertex-wise.
pub fn offset_polyline(points: &[C], side: f64, delta: f64) -> Vec<C> {
    let n = points.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let tan = if i + 1 < n {
            points[i + 1] - points[i]
        } else {
            points[i] - points[i - 1]
        };
        let nrm = unit(tan) * C::new(0.0, 1.0); // left normal
        out.push(points[i] + nrm * (side * delta));
    }
    out
}

/// Circular arc polyline around `center`, radius r, from angle a0 sweeping by `sweep`.
pub fn arc_points(center: C, r: f64, a0: f64, sweep: f64, n: usize) -> Vec<C> {
    (0..=n)
        .map(|k| {
            let a = a0 + sweep * (k as f64) / (n as f64);
            center + C::from_polar(r, a)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seg_seg_basic() {
        let hit = seg_seg(C::new(-1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, -1.0), C::new(0.0, 1.0));
        let (s, t, z) = hit.unwrap();
        assert!((s - 0.5).abs() < 1e-12 && (t - 0.5).abs() < 1e-12);
        assert!(z.norm() < 1e-12);
        assert!(seg_seg(C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(2.0, -1.0), C::new(2.0, 1.0)).is_none());
    }

    #[test]
    fn ray_crossing_sign() {
        // downward ray from origin; left-to-right crossing below it is positive
        let hit = seg_ray(C::new(-1.0, -2.0), C::new(1.0, -2.0), C::new(0.0, 0.0), C::new(0.0, -1.0), 1e-9);
        let (_, u, sign) = hit.unwrap();
        assert!((u - 2.0).abs() < 1e-12);
        assert_eq!(sign, 1);
    }

    #[test]
    fn timedpath_interp() {
        let p = TimedPath::from_points(&[C::new(0.0, 0.0), C::new(2.0, 0.0)], 0.0, 1.0);
        assert!((p.at(0.5) - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!((p.arc_length() - 2.0).abs() < 1e-12);
    }
}
