//! Spectral curve P(z,p) = p^N + sum_i phi_i(z) p^{N-i} over the punctured
//! plane chart: fibers, branch points, sheet continuation, monodromy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{point_polyline_dist, C};
use crate::poly::{det_complex, Poly, RationalFn};

pub const PUNCTURE_TOL: f64 = 1e-9;
pub const DEGENERATE_FIBER_TOL: f64 = 1e-7;
pub const MATCH_MARGIN_FACTOR: f64 = 2.0;
pub const STEP_FLOOR: f64 = 1e-12;
pub const PAIR_SAMPLE_RADIUS: f64 = 1e-3;
pub const AVOID_RADIUS: f64 = 1e-4;
const NEWTON_BP_ITERS: usize = 30;

/// Permutation of {0..n-1}, image-by-index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(a, b);
        Perm(p)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// self after other: (self * other)(i) = self(other(i)).
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[j] = i;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

#[derive(Debug, Clone)]
pub struct SpectralCurveSpec {
    /// Cover degree N >= 1.
    pub n: usize,
    /// phi_1..phi_N; the fiber polynomial is p^N + sum phi_i(z) p^{N-i}.
    pub phis: Vec<RationalFn>,
    /// Finite punctures in the chart. Infinity is always treated as a puncture.
    pub punctures: Vec<C>,
    /// Reference basepoint z_ref fixing the sheet labeling.
    pub basepoint: C,
    /// Working disk |z| < chart_radius.
    pub chart_radius: f64,
}

/// Fiber over a regular point: the N roots of p -> P(z, p).
#[derive(Debug, Clone)]
pub struct Fiber {
    pub z: C,
    pub roots: Vec<C>,
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub z: C,
    /// Common root value at the collision.
    pub p: C,
    /// Colliding sheet labels {i, j} in the reference labeling transported
    /// from the basepoint (cut-free transport along a straight, detoured path).
    pub colliding_pair: (usize, usize),
    /// c in psi_i - psi_j ~ c sqrt(z - z0), anchored at the transport arrival angle.
    pub local_coeff: C,
}

#[derive(Debug, Clone)]
pub struct SheetPath {
    pub base_path: Vec<C>,
    pub fibers: Vec<Fiber>,
    pub permutation: Perm,
}

/// Certificate that no common zero of (P, dP/dz, dP/dp) exists in the chart.
#[derive(Debug, Clone)]
pub struct NonsingularCertificate {
    pub collision_points: Vec<(C, C)>,
    /// Smallest |dP/dz| over all collision points (the margin).
    pub min_dpz: f64,
}

impl SpectralCurveSpec {
    pub fn new(
        n: usize,
        phis: Vec<RationalFn>,
        punctures: Vec<C>,
        basepoint: C,
        chart_radius: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("cover degree N must be >= 1".into()));
        }
        if phis.len() != n {
            return Err(Error::Invalid(format!("expected {} coefficients phi_i, got {}", n, phis.len())));
        }
        if chart_radius <= 0.0 {
            return Err(Error::Invalid("chart_radius must be positive".into()));
        }
        let spec = SpectralCurveSpec { n, phis, punctures, basepoint, chart_radius };
        // every finite pole must be listed as a puncture
        for phi in &spec.phis {
            for pole in phi.poles()? {
                if !spec.punctures.iter().any(|q| (q - pole).norm() < 1e-6) {
                    return Err(Error::Invalid(format!("pole at {} not listed among punctures", pole)));
                }
            }
        }
        if spec.basepoint.norm() >= spec.chart_radius {
            return Err(Error::Invalid("basepoint outside the working chart".into()));
        }
        Ok(spec)
    }

    /// Monic degree-N polynomial p -> P(z, p).
    pub fn fiber_poly(&self, z: C) -> Poly {
        let mut c = vec![C::new(0.0, 0.0); self.n + 1];
        c[self.n] = C::new(1.0, 0.0);
        for (i, phi) in self.phis.iter().enumerate() {
            // phi_{i+1} multiplies p^{N-(i+1)}
            c[self.n - (i + 1)] = phi.eval(z);
        }
        Poly { c }
    }

    /// dP/dz at (z, p), by differentiating the coefficients numerically exactly:
    /// phi' = (num' den - num den') / den^2.
    pub fn dp_dz(&self, z: C, p: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        let mut pk = C::new(1.0, 0.0); // p^{N-i} built from the top down
        let mut powers = vec![C::new(1.0, 0.0); self.n + 1];
        for k in 1..=self.n {
            pk *= p;
            powers[k] = pk;
        }
        for (i, phi) in self.phis.iter().enumerate() {
            let num = phi.num.eval(z);
            let dnum = phi.num.derivative().eval(z);
            let den = phi.den.eval(z);
            let dden = phi.den.derivative().eval(z);
            let dphi = (dnum * den - num * dden) / (den * den);
            acc += dphi * powers[self.n - (i + 1)];
        }
        acc
    }

    pub fn is_puncture(&self, z: C) -> bool {
        self.punctures.iter().any(|q| (q - z).norm() < PUNCTURE_TOL)
    }

    /// Whether infinity carries a puncture (positive degree growth or explicit).
    /// The chart treats infinity as a puncture in all cases; this reports whether
    /// the curve data itself forces it.
    pub fn infinity_is_pole(&self) -> bool {
        self.phis.iter().any(|phi| phi.degree_growth() > 0)
    }
}

/// All N roots of p -> P(z, p), residual-certified.
pub fn roots_at(spec: &SpectralCurveSpec, z: C) -> Result<Fiber> {
    if spec.is_puncture(z) {
        return Err(Error::AtPuncture(z));
    }
    let poly = spec.fiber_poly(z);
    let roots = poly.roots()?;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let mut degenerate = false;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < DEGENERATE_FIBER_TOL * scale {
                degenerate = true;
            }
        }
    }
    Ok(Fiber { z, roots, degenerate })
}

/// Nearest-root matching with separation margin. Returns label -> new index.
pub fn match_roots(prev: &[C], next: &[C]) -> Option<Vec<usize>> {
    let n = prev.len();
    let mut assignment = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (label, pv) in prev.iter().enumerate() {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut second = f64::INFINITY;
        for (k, nv) in next.iter().enumerate() {
            let d = (pv - nv).norm();
            if d < best.0 {
                second = best.0;
                best = (d, k);
            } else if d < second {
                second = d;
            }
        }
        if n > 1 && second < MATCH_MARGIN_FACTOR * best.0 {
            return None;
        }
        if taken[best.1] {
            return None;
        }
        taken[best.1] = true;
        assignment[label] = best.1;
    }
    Some(assignment)
}

/// Continue the labeled fiber values from z_from to z_to with adaptive halving.
pub fn step_fiber(spec: &SpectralCurveSpec, vals: &mut Vec<C>, z_from: C, z_to: C) -> Result<()> {
    step_fiber_inner(spec, vals, z_from, z_to, 0)
}

fn step_fiber_inner(spec: &SpectralCurveSpec, vals: &mut Vec<C>, z_from: C, z_to: C, depth: usize) -> Result<()> {
    if z_from == z_to {
        return Ok(());
    }
    let fiber = roots_at(spec, z_to)?;
    match match_roots(vals, &fiber.roots) {
        Some(assign) => {
            let new_vals: Vec<C> = assign.iter().map(|&k| fiber.roots[k]).collect();
            *vals = new_vals;
            Ok(())
        }
        None => {
            if (z_to - z_from).norm() < STEP_FLOOR || depth > 60 {
                return Err(Error::MatchingAmbiguous { z: z_to, margin: (z_to - z_from).norm() });
            }
            let mid = (z_from + z_to) * 0.5;
            step_fiber_inner(spec, vals, z_from, mid, depth + 1)?;
            step_fiber_inner(spec, vals, mid, z_to, depth + 1)
        }
    }
}

/// Analytic continuation of the whole fiber along a polyline, avoiding Z and P.
pub fn continue_sheets(spec: &SpectralCurveSpec, base_path: &[C]) -> Result<SheetPath> {
    continue_sheets_guarded(spec, base_path, &[], AVOID_RADIUS)
}

pub fn continue_sheets_guarded(
    spec: &SpectralCurveSpec,
    base_path: &[C],
    avoid: &[C],
    avoid_radius: f64,
) -> Result<SheetPath> {
    if base_path.len() < 2 {
        return Err(Error::Invalid("path needs at least two points".into()));
    }
    for zp in avoid.iter().chain(spec.punctures.iter()) {
        let d = point_polyline_dist(*zp, base_path);
        if d < avoid_radius {
            return Err(Error::PathTooCloseToBranchLocus { z: *zp, dist: d });
        }
    }
    let start = roots_at(spec, base_path[0])?;
    let mut vals = start.roots.clone();
    let mut fibers = vec![start];
    for w in base_path.windows(2) {
        step_fiber(spec, &mut vals, w[0], w[1])?;
        fibers.push(Fiber { z: w[1], roots: vals.clone(), degenerate: false });
    }
    // permutation: label at start -> label at end relative to the start ordering.
    // vals[label] is the continuation of start root `label`; match back against
    // the freshly solved end fiber ordering for a well-defined bijection.
    let end_fiber = roots_at(spec, *base_path.last().unwrap())?;
    let assign = match_roots(&vals, &end_fiber.roots)
        .ok_or(Error::MatchingAmbiguous { z: end_fiber.z, margin: 0.0 })?;
    // closed loop: compare end ordering with start ordering when endpoints agree
    let perm = if (base_path[0] - *base_path.last().unwrap()).norm() < 1e-12 {
        let back = match_roots(&fibers[0].roots, &end_fiber.roots)
            .ok_or(Error::MatchingAmbiguous { z: end_fiber.z, margin: 0.0 })?;
        // label i continued ends at end-root assign[i] = back[j] for start label j
        let mut inv = vec![0; spec.n];
        for (j, &k) in back.iter().enumerate() {
            inv[k] = j;
        }
        Perm(assign.iter().map(|&k| inv[k]).collect())
    } else {
        Perm(assign)
    };
    Ok(SheetPath { base_path: base_path.to_vec(), fibers, permutation: perm })
}

/// Transport fiber values from the basepoint to `target`, bending around
/// listed obstacles. Returns labeled values at the target.
pub fn transport_from_basepoint(spec: &SpectralCurveSpec, target: C, obstacles: &[C]) -> Result<Vec<C>> {
    let path = detoured_segment(spec.basepoint, target, obstacles);
    let start = roots_at(spec, path[0])?;
    let mut vals = start.roots;
    for w in path.windows(2) {
        step_fiber(spec, &mut vals, w[0], w[1])?;
    }
    Ok(vals)
}

/// Straight segment with circular detours (left side) around obstacles.
pub fn detoured_segment(from: C, to: C, obstacles: &[C]) -> Vec<C> {
    let mut pts = vec![from];
    let d = to - from;
    let len = d.norm();
    if len == 0.0 {
        return vec![from, to];
    }
    let dir = d / len;
    let mut events: Vec<(f64, C)> = Vec::new();
    for ob in obstacles {
        let w = ob - from;
        let along = w.re * dir.re + w.im * dir.im;
        let perp = crate::geom::cross(dir, w);
        let r = 8.0 * AVOID_RADIUS;
        if along > r && along < len - r && perp.abs() < r {
            events.push((along, *ob));
        }
    }
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (along, ob) in events {
        let r = 8.0 * AVOID_RADIUS;
        let entry = from + dir * (along - r);
        let exit = from + dir * (along + r);
        pts.push(entry);
        // arc over the left side of the obstacle
        let a0 = (entry - ob).arg();
        let a1 = (exit - ob).arg();
        let mut sweep = a1 - a0;
        while sweep <= -std::f64::consts::PI {
            sweep += 2.0 * std::f64::consts::PI;
        }
        while sweep > std::f64::consts::PI {
            sweep -= 2.0 * std::f64::consts::PI;
        }
        for k in 1..8 {
            let a = a0 + sweep * (k as f64) / 8.0;
            pts.push(ob + C::from_polar((entry - ob).norm(), a));
        }
        pts.push(exit);
    }
    pts.push(to);
    pts
}

/// All branch points in the chart: discriminant zeros with colliding pair and
/// local square-root coefficient.
pub fn discriminant_zeros(spec: &SpectralCurveSpec) -> Result<Vec<BranchPoint>> {
    let locations = branch_locations(spec)?;
    let mut out = Vec::new();
    for (z0, p0) in &locations {
        let others: Vec<C> = locations.iter().map(|(z, _)| *z).filter(|z| (z - z0).norm() > 1e-9).collect();
        let (pair, local_coeff) = classify_branch_point(spec, *z0, *p0, &others)?;
        out.push(BranchPoint { z: *z0, p: *p0, colliding_pair: pair, local_coeff });
    }
    out.sort_by(|a, b| (a.z.re, a.z.im).partial_cmp(&(b.z.re, b.z.im)).unwrap());
    Ok(out)
}

/// Locate collision points (P = dP/dp = 0) in the chart by evaluating the
/// Sylvester resultant on a circle, interpolating, and Newton polishing.
pub fn branch_locations(spec: &SpectralCurveSpec) -> Result<Vec<(C, C)>> {
    let n = spec.n;
    if n == 1 {
        return Ok(vec![]);
    }
    // degree bound after clearing denominators
    let dmax: usize = spec
        .phis
        .iter()
        .map(|phi| phi.num.degree() + spec.phis.iter().map(|o| o.den.degree()).sum::<usize>())
        .max()
        .unwrap_or(0)
        .max(1);
    let bound = (2 * n - 1) * dmax + 1;
    let m = bound.next_power_of_two().max(8);
    let radius = spec.chart_radius.max(2.0) * 1.37; // off likely root magnitudes
    // evaluate D(z_k) at scaled roots of unity
    let mut samples = Vec::with_capacity(m);
    for k in 0..m {
        let z = C::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64) / (m as f64));
        samples.push(eval_discriminant(spec, z));
    }
    // inverse DFT for coefficients of D (degree < m)
    let mut coeffs = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = C::new(0.0, 0.0);
        for (k, s) in samples.iter().enumerate() {
            let ang = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / (m as f64);
            acc += s * C::from_polar(1.0, ang);
        }
        acc /= m as f64;
        acc /= radius.powi(j as i32);
        coeffs.push(acc);
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::ResultantDegenerate("discriminant vanishes identically".into()));
    }
    for c in coeffs.iter_mut() {
        if c.norm() < 1e-9 * scale {
            *c = C::new(0.0, 0.0);
        }
    }
    let disc = Poly::new(coeffs);
    if disc.degree() == 0 {
        return Ok(vec![]);
    }
    let mut out: Vec<(C, C)> = Vec::new();
    for root in disc.roots()? {
        if root.norm() >= spec.chart_radius || spec.is_puncture(root) {
            continue;
        }
        if spec.punctures.iter().any(|q| (q - root).norm() < 1e-6) {
            continue;
        }
        match polish_branch_point(spec, root) {
            Ok((z0, p0)) => {
                if z0.norm() < spec.chart_radius && !out.iter().any(|(z, _)| (z - z0).norm() < 1e-7) {
                    out.push((z0, p0));
                }
            }
            Err(Error::NonSimpleRamification { z, count }) => {
                return Err(Error::NonSimpleRamification { z, count });
            }
            Err(_) => {} // spurious interpolation root
        }
    }
    out.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap());
    Ok(out)
}

fn eval_discriminant(spec: &SpectralCurveSpec, z: C) -> C {
    let f = spec.fiber_poly(z);
    let g = f.derivative();
    // scale by the cleared denominators so samples interpolate a polynomial
    let den: C = spec.phis.iter().map(|phi| phi.den.eval(z)).product();
    let size = 2 * spec.n - 1;
    let mut mat = vec![vec![C::new(0.0, 0.0); size]; size];
    for i in 0..spec.n - 1 {
        for (j, a) in f.c.iter().rev().enumerate() {
            mat[i][i + j] = a * den;
        }
    }
    for i in 0..spec.n {
        for (j, b) in g.c.iter().rev().enumerate() {
            mat[spec.n - 1 + i][i + j] = b * den;
        }
    }
    det_complex(mat)
}

fn polish_branch_point(spec: &SpectralCurveSpec, z_init: C) -> Result<(C, C)> {
    // initial p: midpoint of the two closest roots
    let fiber = spec.fiber_poly(z_init).roots()?;
    let mut best = (f64::INFINITY, 0, 1);
    for i in 0..fiber.len() {
        for j in i + 1..fiber.len() {
            let d = (fiber[i] - fiber[j]).norm();
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    let mut z = z_init;
    let mut p = (fiber[best.1] + fiber[best.2]) * 0.5;
    for _ in 0..NEWTON_BP_ITERS {
        let poly = spec.fiber_poly(z);
        let dp = poly.derivative();
        let f1 = poly.eval(p);
        let f2 = dp.eval(p);
        if f1.norm() < 1e-13 && f2.norm() < 1e-13 {
            break;
        }
        // Jacobian of (P, P_p) wrt (z, p)
        let j11 = spec.dp_dz(z, p);
        let j12 = f2;
        let j21 = dpz_of_derivative(spec, z, p);
        let j22 = dp.derivative().eval(p);
        let det = j11 * j22 - j12 * j21;
        if det.norm() < 1e-300 {
            return Err(Error::ResultantDegenerate("singular Newton system at branch point".into()));
        }
        let dz = (f1 * j22 - f2 * j12) / det;
        let dpp = (j11 * f2 - j21 * f1) / det;
        z -= dz;
        p -= dpp;
    }
    let poly = spec.fiber_poly(z);
    let res = poly.eval(p).norm() + poly.derivative().eval(p).norm();
    if res > 1e-8 * poly.coeff_scale() {
        return Err(Error::ResultantDegenerate(format!("branch point polish failed, residual {:e}", res)));
    }
    // simplicity: exactly two roots collide
    let roots = poly.roots()?;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let close = roots.iter().filter(|r| (*r - p).norm() < 1e-4 * scale).count();
    if close > 2 {
        return Err(Error::NonSimpleRamification { z, count: close });
    }
    if poly.derivative().derivative().eval(p).norm() < 1e-9 * poly.coeff_scale() {
        return Err(Error::NonSimpleRamification { z, count: 3 });
    }
    Ok((z, p))
}

fn dpz_of_derivative(spec: &SpectralCurveSpec, z: C, p: C) -> C {
    // d/dz of dP/dp = sum_i phi_i'(z) (N-i) p^{N-i-1}
    let mut acc = C::new(0.0, 0.0);
    for (i, phi) in spec.phis.iter().enumerate() {
        let k = spec.n - (i + 1); // power of p in P
        if k == 0 {
            continue;
        }
        let num = phi.num.eval(z);
        let dnum = phi.num.derivative().eval(z);
        let den = phi.den.eval(z);
        let dden = phi.den.derivative().eval(z);
        let dphi = (dnum * den - num * dden) / (den * den);
        acc += dphi * C::new(k as f64, 0.0) * p.powu((k - 1) as u32);
    }
    acc
}

fn classify_branch_point(
    spec: &SpectralCurveSpec,
    z0: C,
    p0: C,
    other_branch_points: &[C],
) -> Result<((usize, usize), C)> {
    // arrival point at radius PAIR_SAMPLE_RADIUS on the basepoint side
    let dir = crate::geom::unit(spec.basepoint - z0);
    let arrival = z0 + dir * PAIR_SAMPLE_RADIUS;
    let vals = transport_from_basepoint(spec, arrival, other_branch_points)?;
    // colliding pair: the two labels whose values are closest to p0
    let mut order: Vec<usize> = (0..spec.n).collect();
    order.sort_by(|a, b| (vals[*a] - p0).norm().partial_cmp(&(vals[*b] - p0).norm()).unwrap());
    let (mut i, mut j) = (order[0], order[1]);
    if i > j {
        std::mem::swap(&mut i, &mut j);
    }
    if spec.n > 2 {
        let d2 = (vals[order[1]] - p0).norm();
        let d3 = (vals[order[2]] - p0).norm();
        if d3 < 3.0 * d2 {
            return Err(Error::NonSimpleRamification { z: z0, count: 3 });
        }
    }
    // local coefficient: least squares of (psi_i - psi_j) / sqrt(z - z0)
    // on an arc from the arrival angle, sqrt branch continued along the arc
    let theta0 = dir.arg();
    let mut pair_vals = vals;
    let mut acc = C::new(0.0, 0.0);
    let samples = 12usize;
    let mut prev = arrival;
    for k in 0..samples {
        let theta = theta0 + std::f64::consts::PI * (k as f64) / (samples as f64);
        let zk = z0 + C::from_polar(PAIR_SAMPLE_RADIUS, theta);
        if k > 0 {
            step_fiber(spec, &mut pair_vals, prev, zk)?;
        }
        prev = zk;
        let dpsi = pair_vals[i] - pair_vals[j];
        let sqrt = C::from_polar(PAIR_SAMPLE_RADIUS.sqrt(), theta / 2.0);
        acc += dpsi / sqrt;
    }
    let local_coeff = acc / (samples as f64);
    if local_coeff.norm() < 1e-10 {
        return Err(Error::SeedDirectionSolveFailure(z0));
    }
    Ok(((i, j), local_coeff))
}

/// Verify Condition 1.2: no common zero of (P, dP/dz, dP/dp) in the chart.
pub fn check_nonsingular(spec: &SpectralCurveSpec) -> Result<NonsingularCertificate> {
    let locations = branch_locations(spec)?;
    let mut min_dpz = f64::INFINITY;
    for (z0, p0) in &locations {
        let dpz = spec.dp_dz(*z0, *p0).norm();
        if dpz < 1e-8 {
            return Err(Error::SingularCurve { z: *z0, p: *p0 });
        }
        min_dpz = min_dpz.min(dpz);
    }
    Ok(NonsingularCertificate { collision_points: locations, min_dpz })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use super::*;

    pub fn curve_p2_minus_z() -> SpectralCurveSpec {
        // P = p^2 - z: phi_1 = 0, phi_2 = -z
        SpectralCurveSpec::new(
            2,
            vec![RationalFn::zero(), RationalFn::poly(Poly::from_real(&[0.0, -1.0]))],
            vec![],
            Complex64::new(0.7, -0.9),
            8.0,
        )
        .unwrap()
    }

    pub fn curve_cubic() -> SpectralCurveSpec {
        // P = p^3 - 3p + z
        SpectralCurveSpec::new(
            3,
            vec![
                RationalFn::zero(),
                RationalFn::poly(Poly::from_real(&[-3.0])),
                RationalFn::poly(Poly::from_real(&[0.0, 1.0])),
            ],
            vec![],
            Complex64::new(0.3, -3.5),
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn roots_at_square() {
        let spec = curve_p2_minus_z();
        let f = roots_at(&spec, Complex64::new(4.0, 0.0)).unwrap();
        let mut roots = f.roots.clone();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-10);
        assert!((roots[1] - Complex64::new(2.0, 0.0)).norm() < 1e-10);
        assert!(!f.degenerate);
    }

    #[test]
    fn roots_at_branch_fiber_degenerate() {
        let spec = curve_p2_minus_z();
        let f = roots_at(&spec, Complex64::new(0.0, 0.0)).unwrap();
        assert!(f.degenerate);
    }

    #[test]
    fn branch_points_of_square() {
        let spec = curve_p2_minus_z();
        let bps = discriminant_zeros(&spec).unwrap();
        assert_eq!(bps.len(), 1);
        assert!(bps[0].z.norm() < 1e-9);
        assert_eq!(bps[0].colliding_pair, (0, 1));
    }

    #[test]
    fn branch_points_of_cubic() {
        let spec = curve_cubic();
        let bps = discriminant_zeros(&spec).unwrap();
        assert_eq!(bps.len(), 2);
        assert!((bps[0].z - Complex64::new(-2.0, 0.0)).norm() < 1e-8);
        assert!((bps[1].z - Complex64::new(2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn nonsingular_vs_singular() {
        assert!(check_nonsingular(&curve_p2_minus_z()).is_ok());
        // P = p^2 - z^2 is singular at the origin
        let bad = SpectralCurveSpec::new(
            2,
            vec![RationalFn::zero(), RationalFn::poly(Poly::from_real(&[0.0, 0.0, -1.0]))],
            vec![],
            Complex64::new(0.5, 0.5),
            4.0,
        )
        .unwrap();
        match check_nonsingular(&bad) {
            Err(Error::SingularCurve { z, .. }) => assert!(z.norm() < 1e-6),
            other => panic!("expected SingularCurve, got {:?}", other),
        }
    }

    #[test]
    fn monodromy_around_branch_point() {
        let spec = curve_p2_minus_z();
        // loop around z = 0
        let loop_pts: Vec<C> = (0..=48)
            .map(|k| C::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64) / 48.0 - 0.3))
            .collect();
        let sp = continue_sheets(&spec, &loop_pts).unwrap();
        assert_eq!(sp.permutation, Perm(vec![1, 0]));
        // contractible loop away from the branch point
        let small: Vec<C> = (0..=32)
            .map(|k| C::new(3.0, 0.0) + C::from_polar(0.5, 2.0 * std::f64::consts::PI * (k as f64) / 32.0))
            .collect();
        let sp2 = continue_sheets(&spec, &small).unwrap();
        assert!(sp2.permutation.is_identity());
    }

    #[test]
    fn path_too_close_is_rejected() {
        let spec = curve_p2_minus_z();
        let path = vec![C::new(-1.0, 1e-6), C::new(1.0, -1e-6)];
        match continue_sheets_guarded(&spec, &path, &[C::new(0.0, 0.0)], 1e-3) {
            Err(Error::PathTooCloseToBranchLocus { .. }) => {}
            other => panic!("expected proximity error, got {:?}", other),
        }
    }
}
