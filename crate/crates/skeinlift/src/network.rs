//! Spectral network: walls as gradient trajectories of f_i - f_j, N >= 3
//! joints, branch cuts, and the cut-aware sheet-label walker.


use crate::curve::{discriminant_zeros, roots_at, step_fiber, BranchPoint, SpectralCurveSpec};
use crate::error::{Error, Result};
use crate::geom::{cross, point_polyline_dist, seg_seg, unit, C};

pub const WALL_STEP_TOL: f64 = 1e-9;
pub const WALL_MAX_STEP: f64 = 0.05;
pub const WALL_MIN_STEP: f64 = 1e-9;
pub const STOP_RADIUS: f64 = 1e-3;
pub const DEFAULT_MAX_ARC: f64 = 50.0;
pub const MAX_WALL_STEPS: usize = 200_000;
pub const SEED_RADIUS: f64 = 1e-3;
pub const JOINT_TOL: f64 = 1e-6;
pub const CUT_GERM_LEN: f64 = 5e-3;
pub const CUT_CLEARANCE: f64 = 2e-2;
pub const Q_CLEARANCE: f64 = 1e-2;
pub const VALUE_MATCH_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallSource {
    BranchPoint(usize),
    Joint(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallEnd {
    ExitChart,
    StopAtPuncture(usize),
    /// The wall ran into a branch point (terminal event, not a failure).
    SheetCollision(usize),
    MaxArc,
}

/// A wall: trajectory of grad(f_i - f_j), f-difference strictly increasing.
#[derive(Debug, Clone)]
pub struct Wall {
    pub source: WallSource,
    /// Sample points; points[0] is the source (branch point or joint).
    pub points: Vec<C>,
    /// Accumulated f_i - f_j along the wall, anchored at the source value.
    pub f_values: Vec<f64>,
    /// Root values (psi_first, psi_second) per sample, ordered so that
    /// f_first - f_second increases along the wall.
    pub pair_values: Vec<(C, C)>,
    pub end: WallEnd,
}

impl Wall {
    /// Index of the sample closest to arc parameter of point x on the wall.
    pub fn nearest_sample(&self, x: C) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (k, p) in self.points.iter().enumerate() {
            let d = (p - x).norm();
            if d < best.0 {
                best = (d, k);
            }
        }
        best.1
    }

    pub fn seed_direction(&self) -> C {
        unit(self.points[1] - self.points[0])
    }
}

#[derive(Debug, Clone)]
pub struct Joint {
    pub z: C,
    pub incoming: (usize, usize),
    pub outgoing: usize,
    /// f-differences of the incoming walls at the joint.
    pub f_in: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutTarget {
    Puncture(usize),
    Infinity,
}

/// Branch cut: base path from a branch point to a puncture, with the two
/// colliding root branches continued along it. b+ lives on the `pair_plus`
/// branch (oriented away from the ramification point), b- on `pair_minus`
/// (oriented toward it).
#[derive(Debug, Clone)]
pub struct BranchCut {
    pub branch_point: usize,
    pub target: CutTarget,
    pub path: Vec<C>,
    pub pair_plus: Vec<C>,
    pub pair_minus: Vec<C>,
}

#[derive(Debug, Clone)]
pub struct Network {
    pub branch_points: Vec<BranchPoint>,
    pub walls: Vec<Wall>,
    pub joints: Vec<Joint>,
    pub cuts: Vec<BranchCut>,
    pub generation_depth: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct WallOpts {
    pub step_tol: f64,
    pub stop_radius: f64,
    pub max_arc: f64,
    pub max_step: f64,
}

impl Default for WallOpts {
    fn default() -> Self {
        WallOpts { step_tol: WALL_STEP_TOL, stop_radius: STOP_RADIUS, max_arc: DEFAULT_MAX_ARC, max_step: WALL_MAX_STEP }
    }
}

struct WallState {
    z: C,
    vals: Vec<C>,
    pair: (usize, usize),
}

fn wall_velocity(state_vals: &[C], pair: (usize, usize)) -> C {
    let dpsi = state_vals[pair.0] - state_vals[pair.1];
    unit(dpsi.conj())
}

fn rk4_stage(spec: &SpectralCurveSpec, st: &WallState, dz: C) -> Result<C> {
    if dz.norm() == 0.0 {
        return Ok(wall_velocity(&st.vals, st.pair));
    }
    let mut vals = st.vals.clone();
    step_fiber(spec, &mut vals, st.z, st.z + dz)?;
    Ok(wall_velocity(&vals, st.pair))
}

fn rk4_step(spec: &SpectralCurveSpec, st: &WallState, h: f64) -> Result<C> {
    let k1 = rk4_stage(spec, st, C::new(0.0, 0.0))?;
    let k2 = rk4_stage(spec, st, k1 * (h / 2.0))?;
    let k3 = rk4_stage(spec, st, k2 * (h / 2.0))?;
    let k4 = rk4_stage(spec, st, k3 * h)?;
    Ok((k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Trace one wall from a seed with known colliding pair, arc-length RK4.
pub fn trace_wall(
    spec: &SpectralCurveSpec,
    branch_points: &[BranchPoint],
    source: WallSource,
    source_point: C,
    seed_z: C,
    seed_vals: Vec<C>,
    seed_pair: (usize, usize),
    f_start: f64,
    opts: &WallOpts,
) -> Result<Wall> {
    let mut st = WallState { z: seed_z, vals: seed_vals, pair: seed_pair };
    let mut points = vec![source_point, seed_z];
    let dpsi0 = (st.vals[st.pair.0] - st.vals[st.pair.1]).norm();
    let mut f_values = vec![f_start, f_start + 0.5 * dpsi0 * (seed_z - source_point).norm()];
    let mut pair_values = vec![
        (st.vals[st.pair.0], st.vals[st.pair.1]),
        (st.vals[st.pair.0], st.vals[st.pair.1]),
    ];
    let mut arc = (seed_z - source_point).norm();
    let mut h: f64 = 1e-3;
    let mut end = WallEnd::MaxArc;
    let mut steps = 0usize;

    'outer: while arc < opts.max_arc {
        steps += 1;
        if steps > MAX_WALL_STEPS {
            return Err(Error::StepLimitExceeded);
        }
        h = h.min(opts.max_step).max(WALL_MIN_STEP);
        // error control: full step vs two halves
        let full = rk4_step(spec, &st, h)?;
        let half1 = rk4_step(spec, &st, h / 2.0)?;
        let mut mid = WallState { z: st.z + half1, vals: st.vals.clone(), pair: st.pair };
        step_fiber(spec, &mut mid.vals, st.z, mid.z)?;
        let half2 = rk4_step(spec, &mid, h / 2.0)?;
        let err = (full - (half1 + half2)).norm();
        if err > opts.step_tol && h > WALL_MIN_STEP * 4.0 {
            h *= 0.5;
            continue;
        }
        let z_new = st.z + half1 + half2;
        let dpsi_old = (st.vals[st.pair.0] - st.vals[st.pair.1]).norm();
        step_fiber(spec, &mut st.vals, mid.z, z_new)?;
        st.vals = {
            let mut v = mid.vals.clone();
            step_fiber(spec, &mut v, mid.z, z_new)?;
            v
        };
        st.z = z_new;
        let dpsi_new = (st.vals[st.pair.0] - st.vals[st.pair.1]).norm();
        arc += h;
        points.push(st.z);
        f_values.push(f_values.last().unwrap() + 0.5 * (dpsi_old + dpsi_new) * h);
        pair_values.push((st.vals[st.pair.0], st.vals[st.pair.1]));
        if err < opts.step_tol / 16.0 {
            h *= 1.6;
        }

        if st.z.norm() > spec.chart_radius {
            end = WallEnd::ExitChart;
            break;
        }
        for (k, q) in spec.punctures.iter().enumerate() {
            if (st.z - q).norm() < opts.stop_radius {
                end = WallEnd::StopAtPuncture(k);
                break 'outer;
            }
        }
        for (k, bp) in branch_points.iter().enumerate() {
            let own = match source {
                WallSource::BranchPoint(i) => i == k,
                WallSource::Joint(_) => false,
            };
            if !own && (st.z - bp.z).norm() < opts.stop_radius {
                end = WallEnd::SheetCollision(k);
                break 'outer;
            }
        }
        // pair collapse away from any known branch point also terminates
        if dpsi_new < 1e-6 {
            let nearest = branch_points
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1.z - st.z).norm().partial_cmp(&(b.1.z - st.z).norm()).unwrap());
            if let Some((k, _)) = nearest {
                end = WallEnd::SheetCollision(k);
            }
            break;
        }
    }

    Ok(Wall { source, points, f_values, pair_values, end })
}

/// A finite gradient-flow segment with the driving root pair carried along.
#[derive(Debug, Clone)]
pub struct FlowLine {
    pub points: Vec<C>,
    /// (psi_i, psi_j) per sample, flow = grad(f_i - f_j).
    pub pair_values: Vec<(C, C)>,
}

/// Trace the forward trajectory of grad(f_i - f_j) from a point, stopping at
/// max arc length, the chart boundary, or a pair collision.
pub fn trace_flow_line(
    spec: &SpectralCurveSpec,
    start: C,
    start_vals: Vec<C>,
    pair: (usize, usize),
    max_arc: f64,
    step: f64,
) -> Result<FlowLine> {
    let mut st = WallState { z: start, vals: start_vals, pair };
    let mut points = vec![start];
    let mut pair_values = vec![(st.vals[pair.0], st.vals[pair.1])];
    let mut arc = 0.0;
    let mut steps = 0usize;
    while arc < max_arc {
        steps += 1;
        if steps > MAX_WALL_STEPS {
            return Err(Error::StepLimitExceeded);
        }
        let dz = rk4_step(spec, &st, step)?;
        let z_new = st.z + dz;
        if step_fiber(spec, &mut st.vals, st.z, z_new).is_err() {
            break; // pair collision or branch locus: stop the segment here
        }
        st.z = z_new;
        arc += step;
        points.push(st.z);
        pair_values.push((st.vals[st.pair.0], st.vals[st.pair.1]));
        if st.z.norm() > spec.chart_radius {
            break;
        }
        if (st.vals[st.pair.0] - st.vals[st.pair.1]).norm() < 1e-6 {
            break;
        }
        if spec.punctures.iter().any(|q| (st.z - q).norm() < STOP_RADIUS) {
            break;
        }
    }
    Ok(FlowLine { points, pair_values })
}

/// Seed directions at a simple branch point: the three rays where
/// local_coeff * (z-z0)^{3/2} integrates to a positive real increment.
pub fn seed_directions(bp: &BranchPoint) -> [f64; 3] {
    let base = -bp.local_coeff.arg() * 2.0 / 3.0;
    let mut dirs = [0.0; 3];
    for (k, d) in dirs.iter_mut().enumerate() {
        let mut a = base + (k as f64) * 4.0 * std::f64::consts::PI / 3.0;
        while a < 0.0 {
            a += 2.0 * std::f64::consts::PI;
        }
        while a >= 2.0 * std::f64::consts::PI {
            a -= 2.0 * std::f64::consts::PI;
        }
        *d = a;
    }
    dirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dirs
}

/// The three primary walls of a branch point.
pub fn primary_walls(
    spec: &SpectralCurveSpec,
    branch_points: &[BranchPoint],
    bp_idx: usize,
    opts: &WallOpts,
) -> Result<Vec<Wall>> {
    let bp = &branch_points[bp_idx];
    let dirs = seed_directions(bp);
    // angular separation sanity (spec post-condition)
    for k in 0..3 {
        let gap = (dirs[(k + 1) % 3] - dirs[k]).rem_euclid(2.0 * std::f64::consts::PI);
        if (gap - 2.0 * std::f64::consts::PI / 3.0).abs() > 1e-3 {
            return Err(Error::SeedDirectionSolveFailure(bp.z));
        }
    }
    let mut walls = Vec::with_capacity(3);
    for dir in dirs {
        let seed_z = bp.z + C::from_polar(SEED_RADIUS, dir);
        let fiber = roots_at(spec, seed_z)?;
        let mut order: Vec<usize> = (0..spec.n).collect();
        order.sort_by(|a, b| {
            (fiber.roots[*a] - bp.p).norm().partial_cmp(&(fiber.roots[*b] - bp.p).norm()).unwrap()
        });
        let (a, b) = (order[0], order[1]);
        let outward = C::from_polar(1.0, dir);
        // order the pair so f increases outward
        let d1 = fiber.roots[a] - fiber.roots[b];
        let pair = if (d1 * outward).re > 0.0 { (a, b) } else { (b, a) };
        let w = trace_wall(
            spec,
            branch_points,
            WallSource::BranchPoint(bp_idx),
            bp.z,
            seed_z,
            fiber.roots.clone(),
            pair,
            0.0,
            opts,
        )?;
        walls.push(w);
    }
    Ok(walls)
}

/// Grow the network: primary walls, then depth generations of joints (N >= 3).
pub fn grow_network(spec: &SpectralCurveSpec, depth: usize, opts: &WallOpts) -> Result<Network> {
    let branch_points = discriminant_zeros(spec)?;
    let mut walls = Vec::new();
    for k in 0..branch_points.len() {
        walls.extend(primary_walls(spec, &branch_points, k, opts)?);
    }
    let mut joints: Vec<Joint> = Vec::new();
    let mut frontier: Vec<usize> = (0..walls.len()).collect();
    for _gen in 0..depth {
        let mut new_frontier = Vec::new();
        let existing = walls.len();
        let mut spawned: Vec<(Joint, Wall)> = Vec::new();
        for i in 0..existing {
            for &j in frontier.iter() {
                if j <= i {
                    continue;
                }
                for (z, si, sj) in crate::geom::polyline_intersections(&walls[i].points, &walls[j].points) {
                    if z.norm() > spec.chart_radius {
                        continue;
                    }
                    for (first, second, sf, ss) in [(i, j, si, sj), (j, i, sj, si)] {
                        if let Some((joint, wall)) =
                            try_spawn_joint(spec, &branch_points, &walls, first, second, z, sf, ss, opts)?
                        {
                            let dup = spawned.iter().any(|(jt, _)| {
                                (jt.z - joint.z).norm() < JOINT_TOL
                                    && jt.incoming == joint.incoming
                            }) || joints.iter().any(|jt| {
                                (jt.z - joint.z).norm() < JOINT_TOL && jt.incoming == joint.incoming
                            });
                            if !dup {
                                spawned.push((joint, wall));
                            }
                        }
                    }
                }
            }
        }
        for (mut joint, wall) in spawned {
            joint.outgoing = walls.len();
            new_frontier.push(walls.len());
            walls.push(wall);
            joints.push(joint);
        }
        if new_frontier.is_empty() {
            break;
        }
        frontier = new_frontier;
    }
    Ok(Network { branch_points, walls, joints, cuts: Vec::new(), generation_depth: depth })
}

#[allow(clippy::too_many_arguments)]
fn try_spawn_joint(
    spec: &SpectralCurveSpec,
    branch_points: &[BranchPoint],
    walls: &[Wall],
    first: usize,
    second: usize,
    z: C,
    s_first: f64,
    s_second: f64,
    opts: &WallOpts,
) -> Result<Option<(Joint, Wall)>> {
    if spec.n < 3 {
        return Ok(None);
    }
    let w1 = &walls[first];
    let w2 = &walls[second];
    // skip intersections at the shared source of sibling walls
    if s_first < 1.0 || s_second < 1.0 {
        return Ok(None);
    }
    let k1 = w1.nearest_sample(z);
    let k2 = w2.nearest_sample(z);
    let (a1, b1) = w1.pair_values[k1];
    let (a2, b2) = w2.pair_values[k2];
    let scale = a1.norm().max(b1.norm()).max(1.0);
    // composable: (i,j) then (j,k) -> (i,k), by root-value matching at z
    if (b1 - a2).norm() > VALUE_MATCH_TOL * scale {
        return Ok(None);
    }
    if (a1 - b2).norm() < VALUE_MATCH_TOL * scale {
        return Ok(None); // would be (i,i): N=2 style reverse pair
    }
    let fiber = roots_at(spec, z)?;
    let find = |v: C| -> Option<usize> {
        let mut best = (f64::INFINITY, usize::MAX);
        for (k, r) in fiber.roots.iter().enumerate() {
            let d = (r - v).norm();
            if d < best.0 {
                best = (d, k);
            }
        }
        if best.0 < VALUE_MATCH_TOL * scale {
            Some(best.1)
        } else {
            None
        }
    };
    let (ia, ib) = match (find(a1), find(b2)) {
        (Some(x), Some(y)) if x != y => (x, y),
        _ => return Ok(None),
    };
    let f1 = w1.f_values[k1];
    let f2 = w2.f_values[k2];
    let dir = unit((fiber.roots[ia] - fiber.roots[ib]).conj());
    let seed_z = z + dir * SEED_RADIUS;
    let mut vals = fiber.roots.clone();
    step_fiber(spec, &mut vals, z, seed_z)?;
    let wall = trace_wall(
        spec,
        branch_points,
        WallSource::Joint(usize::MAX), // patched by the caller
        z,
        seed_z,
        vals,
        (ia, ib),
        f1 + f2,
        opts,
    )?;
    let joint = Joint { z, incoming: (first, second), outgoing: usize::MAX, f_in: (f1, f2) };
    Ok(Some((joint, wall)))
}

/// Build one cut per branch point: germ tangent to a wall, tail routed to a
/// puncture (or radially out to infinity), greedily keeping cuts disjoint.
pub fn build_cuts(spec: &SpectralCurveSpec, network: &Network, basepoints: &[C]) -> Result<Vec<BranchCut>> {
    let finite_targets: Vec<usize> = (0..spec.punctures.len()).collect();
    let infinity_ok = spec.infinity_is_pole() || spec.punctures.is_empty();
    if finite_targets.is_empty() && !infinity_ok {
        return Err(Error::Invalid("at least one puncture is required for cuts".into()));
    }
    let mut cuts: Vec<BranchCut> = Vec::new();
    for (bp_idx, bp) in network.branch_points.iter().enumerate() {
        let own_walls: Vec<usize> = network
            .walls
            .iter()
            .enumerate()
            .filter(|(_, w)| w.source == WallSource::BranchPoint(bp_idx))
            .map(|(i, _)| i)
            .collect();
        let mut candidates: Vec<(Vec<C>, CutTarget)> = Vec::new();
        for &wi in &own_walls {
            let wall = &network.walls[wi];
            let germ = germ_prefix(&wall.points, CUT_GERM_LEN);
            let germ_end = *germ.last().unwrap();
            let germ_dir = unit(germ_end - germ[germ.len() - 2]);
            // infinity: straight ray variants
            if infinity_ok {
                for rot_deg in [0.0, 12.0, -12.0, 25.0, -25.0] {
                    let d = germ_dir * C::from_polar(1.0, rot_deg * std::f64::consts::PI / 180.0);
                    let mut path = germ.clone();
                    let far = germ_end + d * (spec.chart_radius * 1.1);
                    path.extend(densify(germ_end, far, 0.05 * spec.chart_radius));
                    candidates.push((path, CutTarget::Infinity));
                }
            }
            for &pi in &finite_targets {
                let w = spec.punctures[pi];
                for bend in [0.0, 0.18, -0.18, 0.35, -0.35] {
                    let mut path = germ.clone();
                    let mid = (germ_end + w) * 0.5 + (w - germ_end) * C::new(0.0, bend);
                    path.extend(densify(germ_end, mid, 0.05 * spec.chart_radius));
                    path.extend(densify(mid, w, 0.05 * spec.chart_radius));
                    candidates.push((path, CutTarget::Puncture(pi)));
                }
            }
        }
        // prefer shorter routes
        candidates.sort_by(|a, b| {
            let la: f64 = a.0.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
            let lb: f64 = b.0.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
            la.partial_cmp(&lb).unwrap()
        });
        let mut chosen = None;
        'cand: for (path, target) in candidates {
            for q in basepoints {
                if point_polyline_dist(*q, &path) < Q_CLEARANCE {
                    continue 'cand;
                }
            }
            for other in &cuts {
                if crate::geom::polyline_min_dist(&path, &other.path) < CUT_CLEARANCE {
                    continue 'cand;
                }
            }
            for (k, other_bp) in network.branch_points.iter().enumerate() {
                if k != bp_idx && point_polyline_dist(other_bp.z, &path) < CUT_CLEARANCE {
                    continue 'cand;
                }
            }
            chosen = Some((path, target));
            break;
        }
        let (path, target) = chosen.ok_or(Error::CutRoutingFailure(bp.z))?;
        let (pair_plus, pair_minus) = continue_cut_pair(spec, bp, &path)?;
        cuts.push(BranchCut { branch_point: bp_idx, target, path, pair_plus, pair_minus });
    }
    Ok(cuts)
}

fn germ_prefix(points: &[C], len: f64) -> Vec<C> {
    let mut out = vec![points[0]];
    let mut acc = 0.0;
    for w in points.windows(2) {
        let seg = (w[1] - w[0]).norm();
        if acc + seg >= len {
            let rem = len - acc;
            out.push(w[0] + (w[1] - w[0]) * (rem / seg));
            return refine_germ(&out);
        }
        acc += seg;
        out.push(w[1]);
    }
    refine_germ(&out)
}

/// Subdivide the germ finely: the colliding pair varies like sqrt near the
/// branch point and the stored pair samples are interpolated linearly.
fn refine_germ(points: &[C]) -> Vec<C> {
    let max_seg = 2e-4;
    let mut out = vec![points[0]];
    for w in points.windows(2) {
        let d = w[1] - w[0];
        let n = ((d.norm() / max_seg).ceil() as usize).max(1);
        for k in 1..=n {
            out.push(w[0] + d * (k as f64 / n as f64));
        }
    }
    out
}

fn densify(from: C, to: C, max_seg: f64) -> Vec<C> {
    let d = to - from;
    let n = ((d.norm() / max_seg).ceil() as usize).max(1);
    (1..=n).map(|k| from + d * (k as f64 / n as f64)).collect()
}

/// Continue the colliding pair along the cut, ordered (plus, minus) so that
/// f_plus - f_minus increases along the germ direction.
fn continue_cut_pair(spec: &SpectralCurveSpec, bp: &BranchPoint, path: &[C]) -> Result<(Vec<C>, Vec<C>)> {
    let start = path[1];
    let fiber = roots_at(spec, start)?;
    let mut order: Vec<usize> = (0..spec.n).collect();
    order.sort_by(|a, b| (fiber.roots[*a] - bp.p).norm().partial_cmp(&(fiber.roots[*b] - bp.p).norm()).unwrap());
    let (a, b) = (order[0], order[1]);
    let dir = unit(start - path[0]);
    let d = fiber.roots[a] - fiber.roots[b];
    let (ip, im) = if (d * dir).re > 0.0 { (a, b) } else { (b, a) };
    let mut vals = fiber.roots.clone();
    let mut plus = vec![bp.p, vals[ip]];
    let mut minus = vec![bp.p, vals[im]];
    for w in path[1..].windows(2) {
        step_fiber(spec, &mut vals, w[0], w[1])?;
        plus.push(vals[ip]);
        minus.push(vals[im]);
    }
    Ok((plus, minus))
}

/// Report of the five cut conditions, all boolean.
#[derive(Debug, Clone, Copy)]
pub struct CutConditions {
    /// (1) base path from the branch point to a puncture, shared by both lifts
    pub endpoints: bool,
    /// (2) germ tangent to and directed by grad(f_i - f_j)
    pub germ_directed: bool,
    /// (3) b+ away from p, b- toward p (orientation data present and coherent)
    pub oriented: bool,
    /// (4) cuts pairwise disjoint
    pub disjoint: bool,
    /// (5) cuts disjoint from the fibers over the basepoints
    pub clear_of_basepoints: bool,
}

impl CutConditions {
    pub fn all(&self) -> bool {
        self.endpoints && self.germ_directed && self.oriented && self.disjoint && self.clear_of_basepoints
    }
}

pub fn verify_cut_conditions(
    spec: &SpectralCurveSpec,
    network: &Network,
    cuts: &[BranchCut],
    basepoints: &[C],
) -> CutConditions {
    let mut endpoints = true;
    let mut germ_directed = true;
    let mut oriented = true;
    let mut disjoint = true;
    let mut clear = true;
    for cut in cuts {
        let bp = &network.branch_points[cut.branch_point];
        if (cut.path[0] - bp.z).norm() > 1e-9 {
            endpoints = false;
        }
        match cut.target {
            CutTarget::Puncture(k) => {
                if (cut.path.last().unwrap() - spec.punctures[k]).norm() > 1e-9 {
                    endpoints = false;
                }
            }
            CutTarget::Infinity => {
                if cut.path.last().unwrap().norm() < spec.chart_radius {
                    endpoints = false;
                }
            }
        }
        // germ: flow direction of the plus-minus pair at the first interior sample
        let dir = unit(cut.path[1] - cut.path[0]);
        let dpsi = cut.pair_plus[1] - cut.pair_minus[1];
        let flow = unit(dpsi.conj());
        if (flow - dir).norm() > 0.1 {
            germ_directed = false;
        }
        if (dpsi * dir).re <= 0.0 {
            oriented = false;
        }
    }
    for i in 0..cuts.len() {
        for j in i + 1..cuts.len() {
            if crate::geom::polyline_min_dist(&cuts[i].path, &cuts[j].path) <= 0.0
                || !crate::geom::polyline_intersections(&cuts[i].path, &cuts[j].path).is_empty()
            {
                disjoint = false;
            }
        }
    }
    for cut in cuts {
        for q in basepoints {
            if point_polyline_dist(*q, &cut.path) < Q_CLEARANCE * 0.5 {
                clear = false;
            }
        }
    }
    CutConditions { endpoints, germ_directed, oriented, disjoint, clear_of_basepoints: clear }
}

/// One signed crossing of a walked path with a cut.
#[derive(Debug, Clone, Copy)]
pub struct CutHit {
    pub cut: usize,
    /// Position along the walked segment, in (0,1).
    pub s: f64,
    pub point: C,
    /// +1 if the segment crosses with cross(cut_tangent, seg_dir) > 0.
    pub or_sign: i8,
    /// Root values of the b+ / b- branches at the hit.
    pub r_plus: C,
    pub r_minus: C,
}

pub fn cut_hits_on_segment(cuts: &[BranchCut], a: C, b: C) -> Vec<CutHit> {
    let mut out = Vec::new();
    for (ci, cut) in cuts.iter().enumerate() {
        for j in 0..cut.path.len() - 1 {
            if let Some((t_cut, s_seg, z)) = seg_seg(cut.path[j], cut.path[j + 1], a, b) {
                let tangent = cut.path[j + 1] - cut.path[j];
                let or_sign = if cross(tangent, b - a) > 0.0 { 1 } else { -1 };
                let r_plus = cut.pair_plus[j] + (cut.pair_plus[j + 1] - cut.pair_plus[j]) * t_cut;
                let r_minus = cut.pair_minus[j] + (cut.pair_minus[j + 1] - cut.pair_minus[j]) * t_cut;
                out.push(CutHit { cut: ci, s: s_seg, point: z, or_sign, r_plus, r_minus });
            }
        }
    }
    out.sort_by(|x, y| x.s.partial_cmp(&y.s).unwrap());
    out
}

/// Marked point with a word ray for homotopy-class extraction.
#[derive(Debug, Clone)]
pub struct Marker {
    pub pos: C,
    pub ray_dir: C,
    pub kind: MarkerKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkerKind {
    Puncture,
    /// Branch point with its common root value (for pair identification).
    Branch { p: C },
}

/// Ray angle jitter keeps rays off other markers and basepoints.
pub fn marker_ray_dir(idx: usize) -> C {
    C::from_polar(1.0, -std::f64::consts::FRAC_PI_2 + 1.7e-3 * ((idx + 1) as f64))
}

pub const RAY_MARKER_EPS: f64 = 2e-4;

/// The ambient cover geometry a strand walk happens in.
#[derive(Clone, Copy)]
pub enum CoverGeom<'a> {
    /// Base surface: the trivial 1-sheeted cover, no cuts.
    Trivial,
    Curve { spec: &'a SpectralCurveSpec, cuts: &'a [BranchCut] },
}

impl<'a> CoverGeom<'a> {
    pub fn n_sheets(&self) -> usize {
        match self {
            CoverGeom::Trivial => 1,
            CoverGeom::Curve { spec, .. } => spec.n,
        }
    }

    fn continue_vals(&self, vals: &mut Vec<C>, a: C, b: C) -> Result<()> {
        match self {
            CoverGeom::Trivial => Ok(()),
            CoverGeom::Curve { spec, .. } => step_fiber(spec, vals, a, b),
        }
    }

    fn hits(&self, a: C, b: C) -> Vec<CutHit> {
        match self {
            CoverGeom::Trivial => Vec::new(),
            CoverGeom::Curve { cuts, .. } => cut_hits_on_segment(cuts, a, b),
        }
    }

    pub fn start_values(&self, z: C) -> Result<Vec<C>> {
        match self {
            CoverGeom::Trivial => Ok(vec![C::new(0.0, 0.0)]),
            CoverGeom::Curve { spec, .. } => Ok(roots_at(spec, z)?.roots),
        }
    }
}

/// Homotopy letter as read off a marker ray, decoration transported to the marker.
#[derive(Debug, Clone, Copy)]
pub struct RawLetter {
    pub marker: usize,
    pub exp: i8,
    pub dec_at_marker: usize,
    /// Colliding pair labels at the marker, for branch markers.
    pub pair: Option<(usize, usize)>,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct StrandWalk {
    pub letters: Vec<RawLetter>,
    /// Signed cut crossings of the decorated strand (the c-grading).
    pub c_sum: i64,
    /// Decoration timeline: (time-from, dec), first entry at path start.
    pub dec_timeline: Vec<(f64, usize)>,
    pub end_dec: usize,
    pub end_values: Vec<C>,
}

/// Walk a timed path on the cover: continue the labeled fiber, apply cut
/// transpositions, count signed cut crossings of the decorated strand, and
/// read off marker-ray letters with decorations transported to the marker.
pub fn walk_strand(
    geom: &CoverGeom,
    markers: &[Marker],
    path: &[(f64, C)],
    start_values: Vec<C>,
    start_dec: usize,
) -> Result<StrandWalk> {
    let mut values = start_values;
    let mut dec = start_dec;
    let mut c_sum = 0i64;
    let mut letters = Vec::new();
    let mut dec_timeline = vec![(path[0].0, dec)];
    for w in path.windows(2) {
        let (ta, a) = w[0];
        let (tb, b) = w[1];
        if (b - a).norm() == 0.0 {
            continue;
        }
        // gather cut hits and ray hits on this segment, ordered by s
        #[derive(Clone)]
        enum Ev {
            Cut(CutHit),
            Ray { s: f64, marker: usize, exp: i8, point: C },
        }
        let mut evs: Vec<(f64, Ev)> = geom.hits(a, b).into_iter().map(|h| (h.s, Ev::Cut(h))).collect();
        for (mi, m) in markers.iter().enumerate() {
            if let Some((s, _u, sign)) = crate::geom::seg_ray(a, b, m.pos, m.ray_dir, RAY_MARKER_EPS) {
                evs.push((s, Ev::Ray { s, marker: mi, exp: sign, point: a + (b - a) * s }));
            }
        }
        evs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut from = a;
        for (s, ev) in evs {
            let to = a + (b - a) * s;
            geom.continue_vals(&mut values, from, to)?;
            from = to;
            match ev {
                Ev::Cut(hit) => {
                    let la = nearest_label(&values, hit.r_plus);
                    let lb = nearest_label(&values, hit.r_minus);
                    let sep = (hit.r_plus - hit.r_minus).norm();
                    if la == lb
                        || (values[la] - hit.r_plus).norm() > 0.35 * sep
                        || (values[lb] - hit.r_minus).norm() > 0.35 * sep
                    {
                        return Err(Error::MatchingAmbiguous {
                            z: hit.point,
                            margin: (values[la] - hit.r_plus).norm(),
                        });
                    }
                    if dec == la {
                        c_sum += hit.or_sign as i64;
                    } else if dec == lb {
                        c_sum -= hit.or_sign as i64;
                    }
                    values.swap(la, lb);
                    if dec == la {
                        dec = lb;
                        dec_timeline.push((ta + (tb - ta) * s, dec));
                    } else if dec == lb {
                        dec = la;
                        dec_timeline.push((ta + (tb - ta) * s, dec));
                    }
                }
                Ev::Ray { s, marker, exp, point } => {
                    let t = ta + (tb - ta) * s;
                    let (dec_at_marker, pair) = ray_transport(geom, markers, marker, point, &values, dec)?;
                    letters.push(RawLetter { marker, exp, dec_at_marker, pair, t });
                }
            }
        }
        geom.continue_vals(&mut values, from, b)?;
    }
    Ok(StrandWalk { letters, c_sum, dec_timeline, end_dec: dec, end_values: values })
}

/// Transport the decoration from a ray crossing up to the marker; for branch
/// markers also identify the colliding pair there.
fn ray_transport(
    geom: &CoverGeom,
    markers: &[Marker],
    marker: usize,
    point: C,
    values: &[C],
    dec: usize,
) -> Result<(usize, Option<(usize, usize)>)> {
    let m = &markers[marker];
    if let CoverGeom::Trivial = geom {
        return Ok((0, None));
    }
    let stop = m.pos + crate::geom::unit(point - m.pos) * RAY_MARKER_EPS;
    let mut vals = values.to_vec();
    let mut d = dec;
    // walk straight along the ray toward the marker, applying cut swaps
    let seg = [point, stop];
    let hits = geom.hits(seg[0], seg[1]);
    let mut from = seg[0];
    for hit in hits {
        let to = seg[0] + (seg[1] - seg[0]) * hit.s;
        geom.continue_vals(&mut vals, from, to)?;
        from = to;
        let la = nearest_label(&vals, hit.r_plus);
        let lb = nearest_label(&vals, hit.r_minus);
        if la == lb {
            return Err(Error::MatchingAmbiguous { z: hit.point, margin: 0.0 });
        }
        vals.swap(la, lb);
        if d == la {
            d = lb;
        } else if d == lb {
            d = la;
        }
    }
    geom.continue_vals(&mut vals, from, seg[1])?;
    let pair = match m.kind {
        MarkerKind::Puncture => None,
        MarkerKind::Branch { p } => {
            let mut order: Vec<usize> = (0..vals.len()).collect();
            order.sort_by(|x, y| (vals[*x] - p).norm().partial_cmp(&(vals[*y] - p).norm()).unwrap());
            let (mut x, mut y) = (order[0], order[1]);
            if x > y {
                std::mem::swap(&mut x, &mut y);
            }
            Some((x, y))
        }
    };
    Ok((d, pair))
}

fn nearest_label(values: &[C], v: C) -> usize {
    let mut best = (f64::INFINITY, 0usize);
    for (k, x) in values.iter().enumerate() {
        let d = (x - v).norm();
        if d < best.0 {
            best = (d, k);
        }
    }
    best.1
}

/// Cut-respecting label field at z: transport from the basepoint along a
/// straight (obstacle-detoured) path, applying cut swaps en route.
pub fn field_values_at(spec: &SpectralCurveSpec, network: &Network, z: C) -> Result<Vec<C>> {
    let obstacles: Vec<C> = network.branch_points.iter().map(|b| b.z).collect();
    let path = crate::curve::detoured_segment(spec.basepoint, z, &obstacles);
    let start = roots_at(spec, path[0])?;
    let geom = CoverGeom::Curve { spec, cuts: &network.cuts };
    let timed: Vec<(f64, C)> = path.iter().enumerate().map(|(k, p)| (k as f64, *p)).collect();
    let res = walk_strand(&geom, &[], &timed, start.roots, 0)?;
    Ok(res.end_values)
}

/// Signed intersection number of a decorated base path with the cut system.
/// The path starts on sheet label `start_dec` (labels in the cut-respecting
/// field at its start point).
pub fn intersection_number(
    spec: &SpectralCurveSpec,
    network: &Network,
    path: &[C],
    start_dec: usize,
) -> Result<i64> {
    let start_values = field_values_at(spec, network, path[0])?;
    // tangency guard: reject near-parallel grazing up front
    for w in path.windows(2) {
        for cut in network.cuts.iter() {
            for cw in cut.path.windows(2) {
                if let Some((_, _, z)) = seg_seg(cw[0], cw[1], w[0], w[1]) {
                    let d1 = unit(cw[1] - cw[0]);
                    let d2 = unit(w[1] - w[0]);
                    if cross(d1, d2).abs() < 1e-9 {
                        return Err(Error::TangencyDetected(z));
                    }
                }
            }
        }
    }
    let geom = CoverGeom::Curve { spec, cuts: &network.cuts };
    let timed: Vec<(f64, C)> = path.iter().enumerate().map(|(k, p)| (k as f64, *p)).collect();
    Ok(walk_strand(&geom, &[], &timed, start_values, start_dec)?.c_sum)
}

/// Convenience: full pipeline (network + cuts) used by the CLI and tests.
pub fn build_network_with_cuts(
    spec: &SpectralCurveSpec,
    depth: usize,
    basepoints: &[C],
    opts: &WallOpts,
) -> Result<Network> {
    let mut network = grow_network(spec, depth, opts)?;
    network.cuts = build_cuts(spec, &network, basepoints)?;
    Ok(network)
}

