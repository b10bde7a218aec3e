//! The desk-scale nonabelianization map: a braid on the base goes to an
//! N^kappa x N^kappa matrix over the braid skein algebra of the cover, by
//! enumerating detour and exchange events against the traced network.

use num_complex::Complex64;
use rand::Rng;

use crate::braid::{skein_normalize, SkeinContext, Strand, Tangle};
use crate::curve::{roots_at, step_fiber, SpectralCurveSpec};
use crate::error::{Error, Result};
use crate::geom::{arc_points, cross, point_seg_dist, seg_seg_halfopen, unit, TimedPath, C};
use crate::matskein::{mat_equal, mat_mul, MatSkein, SheetAssignment};
use crate::network::{trace_flow_line, Network};
use crate::ring::HbarC;

pub const U_R_RADIUS: f64 = 1e-2;
pub const EVENT_TIME_TOL: f64 = 1e-6;
pub const EXCHANGE_T_TOL: f64 = 1e-8;
pub const TRANSVERSALITY_TOL: f64 = 1e-3;
const CONNECTOR_OFFSET: f64 = 1e-4;
const CONNECTOR_DT: f64 = 1e-9;
const EXCHANGE_GRID: usize = 96;
const EXCHANGE_CAPTURE: f64 = 0.35;

/// Everything the lift needs: curve, traced network with cuts, basepoints.
pub struct LiftSetup<'a> {
    pub spec: &'a SpectralCurveSpec,
    pub network: &'a Network,
    pub basepoints: Vec<C>,
    /// Remark-2.4 alternate sign convention for the ramification relation.
    pub flipped_sign: bool,
    /// Error out (instead of skipping) when an event matches no transport.
    pub strict_events: bool,
}

impl<'a> LiftSetup<'a> {
    pub fn new(spec: &'a SpectralCurveSpec, network: &'a Network, basepoints: Vec<C>) -> Self {
        LiftSetup { spec, network, basepoints, flipped_sign: false, strict_events: false }
    }

    pub fn ctx(&self) -> SkeinContext<'a> {
        SkeinContext::cover(self.spec, self.network, &self.network.cuts, self.flipped_sign)
    }
}

/// Folded-Morse-tree event against the network.
#[derive(Debug, Clone)]
pub struct FoldedTreeEvent {
    pub t: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone)]
pub enum EventKind {
    /// One cusp leg: the strand position crosses a wall; the leg runs down
    /// the wall to its branch point.
    Detour {
        strand: usize,
        wall: usize,
        /// Wall segment index containing the crossing.
        seg: usize,
        point: C,
        /// Sign of cross(wall_tangent, strand_velocity).
        chi: i8,
    },
    /// One diagonal vertex: strand `down`'s position lies on the forward
    /// gradient flow line through strand `up`'s position.
    Exchange {
        up: usize,
        down: usize,
        /// Flow segment from the upstream to the downstream position.
        segment: Vec<C>,
        /// (psi_i, psi_j) at the upstream / downstream ends.
        pair_up: (C, C),
        pair_down: (C, C),
    },
}

/// Detect detour and exchange events of a base braid against the network.
pub fn detect_events(setup: &LiftSetup, tangle: &Tangle) -> Result<Vec<FoldedTreeEvent>> {
    validate_braid(setup, tangle)?;
    let mut events = Vec::new();
    // detours: transverse strand x wall crossings
    for (si, strand) in tangle.strands.iter().enumerate() {
        for (wi, wall) in setup.network.walls.iter().enumerate() {
            for pw in strand.path.pts.windows(2) {
                let (ta, a) = pw[0];
                let (tb, b) = pw[1];
                for (seg, ww) in wall.points.windows(2).enumerate() {
                    if let Some((s_wall, s_strand, z)) = seg_seg_halfopen(ww[0], ww[1], a, b) {
                        let _ = s_wall;
                        let wt = unit(ww[1] - ww[0]);
                        let sv = unit(b - a);
                        let x = cross(wt, sv);
                        if x.abs() < TRANSVERSALITY_TOL {
                            return Err(Error::NonTransverseInput(z));
                        }
                        // ignore crossings of the wall seed stub inside the
                        // branch-point disk; braids cannot get there anyway
                        if (z - wall.points[0]).norm() < U_R_RADIUS {
                            continue;
                        }
                        let t = ta + (tb - ta) * s_strand;
                        events.push(FoldedTreeEvent {
                            t,
                            kind: EventKind::Detour {
                                strand: si,
                                wall: wi,
                                seg,
                                point: z,
                                chi: if x > 0.0 { 1 } else { -1 },
                            },
                        });
                    }
                }
            }
        }
    }
    // exchanges: synchronous flow-line incidences between strand pairs
    if tangle.strands.len() >= 2 {
        detect_exchanges(setup, tangle, &mut events)?;
    }
    events.sort_by(|x, y| x.t.partial_cmp(&y.t).unwrap());
    for w in events.windows(2) {
        if (w[1].t - w[0].t).abs() < EVENT_TIME_TOL {
            return Err(Error::EventCollision(w[0].t));
        }
    }
    Ok(events)
}

fn validate_braid(setup: &LiftSetup, tangle: &Tangle) -> Result<()> {
    let mut guard_pts: Vec<C> = setup.network.branch_points.iter().map(|b| b.z).collect();
    guard_pts.extend(setup.spec.punctures.iter().cloned());
    for strand in &tangle.strands {
        for w in strand.path.pts.windows(2) {
            for g in &guard_pts {
                if point_seg_dist(*g, w[0].1, w[1].1) < U_R_RADIUS {
                    return Err(Error::PathTooCloseToBranchLocus {
                        z: *g,
                        dist: point_seg_dist(*g, w[0].1, w[1].1),
                    });
                }
            }
        }
    }
    Ok(())
}

fn detect_exchanges(setup: &LiftSetup, tangle: &Tangle, events: &mut Vec<FoldedTreeEvent>) -> Result<()> {
    let kappa = tangle.strands.len();
    let n = setup.spec.n;
    let mut found: Vec<(usize, usize, f64)> = Vec::new(); // (min strand, max strand, t)
    for up in 0..kappa {
        for down in 0..kappa {
            if up == down {
                continue;
            }
            // signed transversal offset of x_down from the forward flow line
            // through x_up, per ordered sheet pair at x_up
            for pa in 0..n {
                for pb in 0..n {
                    if pa == pb {
                        continue;
                    }
                    let mut prev: Option<(f64, f64)> = None;
                    for g in 0..=EXCHANGE_GRID {
                        let t = g as f64 / EXCHANGE_GRID as f64;
                        let d = exchange_offset(setup, tangle, up, down, (pa, pb), t)?;
                        if let (Some((tp, dp)), Some(dc)) = (prev, d) {
                            if dp.signum() != dc.signum() && dp != 0.0 {
                                if let Some(t_star) =
                                    bisect_exchange(setup, tangle, up, down, (pa, pb), tp, t, dp)?
                                {
                                    let key = (up.min(down), up.max(down));
                                    if !found.iter().any(|(a, b, tt)| {
                                        (*a, *b) == key && (tt - t_star).abs() < EVENT_TIME_TOL
                                    }) {
                                        found.push((key.0, key.1, t_star));
                                        if let Some(ev) =
                                            build_exchange(setup, tangle, up, down, (pa, pb), t_star)?
                                        {
                                            events.push(ev);
                                        }
                                    }
                                }
                            }
                        }
                        prev = d.map(|dc| (t, dc));
                        if d.is_none() {
                            prev = None;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Trace the flow from x_up(t) and return the signed offset of x_down(t)
/// from the trajectory, or None when it is not captured.
fn exchange_offset(
    setup: &LiftSetup,
    tangle: &Tangle,
    up: usize,
    down: usize,
    pair: (usize, usize),
    t: f64,
) -> Result<Option<f64>> {
    let x_up = tangle.strands[up].path.at(t);
    let x_down = tangle.strands[down].path.at(t);
    let max_arc = (x_down - x_up).norm() * 2.5 + 0.5;
    if max_arc > 12.0 {
        return Ok(None);
    }
    let fiber = match roots_at(setup.spec, x_up) {
        Ok(f) => f,
        Err(_) => return Ok(None),
    };
    let flow = match trace_flow_line(setup.spec, x_up, fiber.roots, pair, max_arc, 0.01) {
        Ok(f) => f,
        Err(_) => return Ok(None),
    };
    // nearest point of the trajectory to x_down
    let mut best: Option<(f64, usize, f64)> = None; // (dist, seg, s)
    for (k, w) in flow.points.windows(2).enumerate() {
        let d = w[1] - w[0];
        let l2 = d.norm_sqr();
        if l2 == 0.0 {
            continue;
        }
        let s = (((x_down - w[0]).re * d.re) + ((x_down - w[0]).im * d.im)) / l2;
        let s = s.clamp(0.0, 1.0);
        let p = w[0] + d * s;
        let dist = (x_down - p).norm();
        if best.map(|(bd, _, _)| dist < bd).unwrap_or(true) {
            best = Some((dist, k, s));
        }
    }
    let (dist, seg, s) = match best {
        Some(b) => b,
        None => return Ok(None),
    };
    // must be genuinely downstream (not at the start) and captured transversally
    if seg == 0 && s <= 0.0 {
        return Ok(None);
    }
    if seg + 2 >= flow.points.len() && s >= 1.0 {
        return Ok(None);
    }
    if dist > EXCHANGE_CAPTURE {
        return Ok(None);
    }
    let tangent = unit(flow.points[seg + 1] - flow.points[seg]);
    let nearest = flow.points[seg] + (flow.points[seg + 1] - flow.points[seg]) * s;
    Ok(Some(cross(tangent, x_down - nearest)))
}

fn bisect_exchange(
    setup: &LiftSetup,
    tangle: &Tangle,
    up: usize,
    down: usize,
    pair: (usize, usize),
    mut t_lo: f64,
    mut t_hi: f64,
    d_lo: f64,
) -> Result<Option<f64>> {
    let mut sign_lo = d_lo.signum();
    for _ in 0..60 {
        if t_hi - t_lo < EXCHANGE_T_TOL {
            return Ok(Some(0.5 * (t_lo + t_hi)));
        }
        let mid = 0.5 * (t_lo + t_hi);
        match exchange_offset(setup, tangle, up, down, pair, mid)? {
            Some(d) => {
                if d.signum() == sign_lo {
                    t_lo = mid;
                } else {
                    t_hi = mid;
                }
            }
            None => {
                // capture lost mid-bisection: give up on this root
                return Ok(None);
            }
        }
        let _ = &mut sign_lo;
    }
    Ok(Some(0.5 * (t_lo + t_hi)))
}

fn build_exchange(
    setup: &LiftSetup,
    tangle: &Tangle,
    up: usize,
    down: usize,
    pair: (usize, usize),
    t: f64,
) -> Result<Option<FoldedTreeEvent>> {
    let x_up = tangle.strands[up].path.at(t);
    let x_down = tangle.strands[down].path.at(t);
    let fiber = roots_at(setup.spec, x_up)?;
    let max_arc = (x_down - x_up).norm() * 2.5 + 0.5;
    let flow = trace_flow_line(setup.spec, x_up, fiber.roots.clone(), pair, max_arc, 0.004)?;
    // truncate at the closest approach to x_down
    let mut best = (f64::INFINITY, 0usize);
    for (k, p) in flow.points.iter().enumerate() {
        let d = (p - x_down).norm();
        if d < best.0 {
            best = (d, k);
        }
    }
    if best.0 > 5e-3 {
        return Ok(None);
    }
    let k = best.1.max(1);
    let mut segment: Vec<C> = flow.points[..=k].to_vec();
    *segment.last_mut().unwrap() = x_down;
    let pair_up = flow.pair_values[0];
    let pair_down = flow.pair_values[k];
    Ok(Some(FoldedTreeEvent {
        t,
        kind: EventKind::Exchange { up, down, segment, pair_up, pair_down },
    }))
}

// ---------------------------------------------------------------------------
// Lift assembly
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct LiftStrand {
    /// Accumulated cover-strand geometry.
    path: Vec<(f64, C)>,
    /// Labeled fiber values along the walk.
    values: Vec<C>,
    dec: usize,
    /// Base strand whose future this strand currently follows.
    src: usize,
    /// Time up to which the base path has been consumed.
    t: f64,
}

/// One pre-normalization term of the lift, for grading inspection.
pub struct LiftTerm {
    pub strands: Vec<Strand>,
    /// Number of exchange events used (the diagonal vertices).
    pub hbar_power: u32,
    pub events_used: Vec<usize>,
    pub beta: Vec<u8>,
}

/// Enumerate the lift terms for one source assignment.
pub fn lift_terms(
    setup: &LiftSetup,
    tangle: &Tangle,
    events: &[FoldedTreeEvent],
    alpha: &SheetAssignment,
) -> Result<Vec<LiftTerm>> {
    let kappa = tangle.strands.len();
    let mut init = Vec::with_capacity(kappa);
    for (k, strand) in tangle.strands.iter().enumerate() {
        let start = strand.path.start();
        let values = crate::network::field_values_at(setup.spec, setup.network, start)?;
        init.push(LiftStrand {
            path: vec![(0.0, start)],
            values,
            dec: alpha.0[k] as usize,
            src: k,
            t: 0.0,
        });
    }
    let mut terms = Vec::new();
    lift_dfs(setup, tangle, events, 0, init, Vec::new(), &mut terms)?;
    Ok(terms)
}

fn advance(setup: &LiftSetup, tangle: &Tangle, st: &mut LiftStrand, to: f64) -> Result<()> {
    if to <= st.t {
        return Ok(());
    }
    let base = &tangle.strands[st.src].path;
    let mut pts = base.suffix(st.t);
    pts.retain(|(tt, _)| *tt <= to + 1e-15);
    if pts.last().map(|(tt, _)| *tt < to - 1e-15).unwrap_or(true) {
        pts.push((to, base.at(to)));
    }
    walk_dec(setup, st, &pts)?;
    st.t = to;
    Ok(())
}

/// Extend the strand along explicit points, updating values/dec across cuts.
fn walk_dec(setup: &LiftSetup, st: &mut LiftStrand, pts: &[(f64, C)]) -> Result<()> {
    for w in pts.windows(2) {
        let (_, a) = w[0];
        let (_, b) = w[1];
        if (b - a).norm() > 0.0 {
            let hits = crate::network::cut_hits_on_segment(&setup.network.cuts, a, b);
            let mut from = a;
            for hit in hits {
                let to = a + (b - a) * hit.s;
                step_fiber(setup.spec, &mut st.values, from, to)?;
                from = to;
                let la = nearest(&st.values, hit.r_plus);
                let lb = nearest(&st.values, hit.r_minus);
                let sep = (hit.r_plus - hit.r_minus).norm();
                if la == lb || (st.values[la] - hit.r_plus).norm() > 0.35 * sep {
                    return Err(Error::MatchingAmbiguous { z: hit.point, margin: 0.0 });
                }
                st.values.swap(la, lb);
                if st.dec == la {
                    st.dec = lb;
                } else if st.dec == lb {
                    st.dec = la;
                }
            }
            step_fiber(setup.spec, &mut st.values, from, b)?;
        }
    }
    let start_t = st.path.last().unwrap().0;
    for (tt, z) in pts.iter().skip(1) {
        if *tt > start_t + 1e-16 {
            st.path.push((*tt, *z));
        }
    }
    Ok(())
}

fn nearest(values: &[C], v: C) -> usize {
    let mut best = (f64::INFINITY, 0usize);
    for (k, x) in values.iter().enumerate() {
        let d = (x - v).norm();
        if d < best.0 {
            best = (d, k);
        }
    }
    best.1
}

fn lift_dfs(
    setup: &LiftSetup,
    tangle: &Tangle,
    events: &[FoldedTreeEvent],
    next_event: usize,
    mut strands: Vec<LiftStrand>,
    used: Vec<usize>,
    out: &mut Vec<LiftTerm>,
) -> Result<()> {
    if next_event >= events.len() {
        for st in strands.iter_mut() {
            advance(setup, tangle, st, 1.0)?;
        }
        let kappa = strands.len();
        let mut beta = vec![0u8; kappa];
        let mut cover = Vec::with_capacity(kappa);
        for st in &strands {
            let end = st.path.last().unwrap().1;
            let slot = setup
                .basepoints
                .iter()
                .position(|q| (q - end).norm() < 1e-7)
                .ok_or_else(|| Error::NonBraidDiagram("lifted strand ends off the basepoints".into()))?;
            beta[slot] = st.dec as u8;
        }
        for (k, st) in strands.iter().enumerate() {
            let _ = k;
            cover.push(Strand {
                path: TimedPath::new(st.path.clone()),
                start_dec: 0, // patched by caller below
            });
        }
        // start decs: strand k started on alpha(k); recover from the DFS init
        // (the path rebuild keeps strand order = start order)
        out.push(LiftTerm {
            strands: cover,
            hbar_power: used
                .iter()
                .filter(|&&e| matches!(events[e].kind, EventKind::Exchange { .. }))
                .count() as u32,
            events_used: used,
            beta,
        });
        return Ok(());
    }
    let ev = &events[next_event];
    for st in strands.iter_mut() {
        advance(setup, tangle, st, ev.t)?;
    }
    // the branch that skips this event
    lift_dfs(setup, tangle, events, next_event + 1, strands.clone(), used.clone(), out)?;

    match &ev.kind {
        EventKind::Detour { strand, wall, seg, point, chi } => {
            let holder = strands.iter().position(|s| s.src == *strand).unwrap();
            let w = &setup.network.walls[*wall];
            // wall labels at the crossing in the current transported frame
            let (vp, vm) = wall_pair_at(w, *seg, *point);
            let li = nearest(&strands[holder].values, vp);
            let lj = nearest(&strands[holder].values, vm);
            if li == lj {
                return Err(Error::MatchingAmbiguous { z: *point, margin: 0.0 });
            }
            if strands[holder].dec == lj {
                let mut branched = strands.clone();
                let connector = detour_connector(setup, w, *seg, *point, *chi);
                let t0 = ev.t;
                let pts: Vec<(f64, C)> = connector
                    .iter()
                    .enumerate()
                    .map(|(i, z)| (t0 + CONNECTOR_DT * ((i + 1) as f64) / connector.len() as f64, *z))
                    .collect();
                let mut with_start = vec![(t0, *point)];
                with_start.extend(pts);
                walk_dec(setup, &mut branched[holder], &with_start)?;
                let mut used2 = used.clone();
                used2.push(next_event);
                lift_dfs(setup, tangle, events, next_event + 1, branched, used2, out)?;
            } else if setup.strict_events && strands[holder].dec != li {
                return Err(Error::InconsistentSheetMatching);
            }
        }
        EventKind::Exchange { up, down, segment, pair_up, pair_down } => {
            let hu = strands.iter().position(|s| s.src == *up).unwrap();
            let hd = strands.iter().position(|s| s.src == *down).unwrap();
            let iu = nearest(&strands[hu].values, pair_up.0);
            let ju = nearest(&strands[hu].values, pair_up.1);
            let id = nearest(&strands[hd].values, pair_down.0);
            let jd = nearest(&strands[hd].values, pair_down.1);
            if iu == ju || id == jd {
                return Err(Error::MatchingAmbiguous { z: segment[0], margin: 0.0 });
            }
            // matching 1: downstream on j jumps to i, upstream on i jumps to j
            // matching 2: the mirror
            for (dec_down_need, dec_up_need) in [(jd, iu), (id, ju)] {
                if strands[hd].dec == dec_down_need && strands[hu].dec == dec_up_need {
                    let mut branched = strands.clone();
                    let t0 = ev.t;
                    // downstream strand travels the segment reversed, then
                    // follows the upstream base strand; and vice versa
                    let mut rev = segment.clone();
                    rev.reverse();
                    let pts_down: Vec<(f64, C)> = timei(&rev, t0);
                    let pts_up: Vec<(f64, C)> = timei(segment, t0);
                    walk_dec(setup, &mut branched[hd], &pts_down)?;
                    walk_dec(setup, &mut branched[hu], &pts_up)?;
                    let su = branched[hu].src;
                    let sd = branched[hd].src;
                    branched[hu].src = sd;
                    branched[hd].src = su;
                    let mut used2 = used.clone();
                    used2.push(next_event);
                    lift_dfs(setup, tangle, events, next_event + 1, branched, used2, out)?;
                }
            }
        }
    }
    Ok(())
}

fn timei(pts: &[C], t0: f64) -> Vec<(f64, C)> {
    let n = pts.len().max(2);
    pts.iter()
        .enumerate()
        .map(|(i, z)| (t0 + CONNECTOR_DT * ((i + 1) as f64) / n as f64, *z))
        .collect()
}

fn wall_pair_at(w: &crate::network::Wall, seg: usize, point: C) -> (C, C) {
    // linear interpolation of the stored pair values on the segment
    let (a, b) = (w.points[seg], w.points[seg + 1]);
    let l2 = (b - a).norm_sqr();
    let s = if l2 > 0.0 {
        (((point - a).re * (b - a).re) + ((point - a).im * (b - a).im)) / l2
    } else {
        0.0
    };
    let (p0, m0) = w.pair_values[seg];
    let (p1, m1) = w.pair_values[seg + 1];
    (p0 + (p1 - p0) * s, m0 + (m1 - m0) * s)
}

/// The cusp-leg connector: down the wall on the incoming side, once around
/// the branch point (the side forced by the crossing orientation), back on
/// the outgoing side.
fn detour_connector(
    setup: &LiftSetup,
    wall: &crate::network::Wall,
    seg: usize,
    point: C,
    chi: i8,
) -> Vec<C> {
    let bp = wall.points[0];
    let delta = CONNECTOR_OFFSET;
    let side_in = -(chi as f64);
    let side_out = chi as f64;
    // wall samples from the crossing back toward the branch point (index 1 is
    // the first sample off the branch point, at the seed radius)
    let mut down_base: Vec<C> = vec![point];
    for k in (1..=seg).rev() {
        down_base.push(wall.points[k]);
    }
    let offset = |pts: &[C], side: f64| -> Vec<C> {
        // offset relative to the wall's own orientation (away from bp)
        pts.iter()
            .enumerate()
            .map(|(i, p)| {
                let tan = if i + 1 < pts.len() { pts[i] - pts[i + 1] } else { pts[i - 1] - pts[i] };
                // tan points away from bp along the wall
                let nl = unit(tan) * C::new(0.0, 1.0);
                p + nl * (side * delta)
            })
            .collect()
    };
    let down = offset(&down_base, side_in);
    let mut up_base = down_base.clone();
    up_base.reverse();
    let up = offset(&up_base, side_out);
    // tip: from the end of the down leg around the branch point to the start
    // of the up leg, sweeping away from the wall germ (roughly a full turn)
    let tip_from = *down.last().unwrap();
    let tip_to = up[0];
    let r_in = (tip_from - bp).norm();
    let r_out = (tip_to - bp).norm();
    let a_in = (tip_from - bp).arg();
    let a_out = (tip_to - bp).arg();
    let mut sweep = a_out - a_in;
    if chi > 0 {
        while sweep > -std::f64::consts::PI {
            sweep -= 2.0 * std::f64::consts::PI;
        }
    } else {
        while sweep < std::f64::consts::PI {
            sweep += 2.0 * std::f64::consts::PI;
        }
    }
    let mut out = vec![point];
    out.extend(down.iter().skip(0).cloned());
    let arc = arc_points(bp, 0.5 * (r_in + r_out), a_in, sweep, 32);
    out.extend(arc);
    out.extend(up.iter().cloned());
    out.push(point);
    let _ = setup;
    out
}

/// The nonabelianization map on a base braid: matrix of normalized cover
/// skein elements indexed by sheet assignments.
pub fn lift(setup: &LiftSetup, tangle: &Tangle) -> Result<MatSkein> {
    let events = detect_events(setup, tangle)?;
    lift_with_events(setup, tangle, &events)
}

pub fn lift_with_events(setup: &LiftSetup, tangle: &Tangle, events: &[FoldedTreeEvent]) -> Result<MatSkein> {
    let kappa = tangle.strands.len();
    let n = setup.spec.n;
    let ctx = setup.ctx();
    let mut mat = MatSkein::zero(n, kappa);
    for alpha in SheetAssignment::enumerate(n, kappa) {
        let terms = lift_terms(setup, tangle, events, &alpha)?;
        for term in terms {
            let cover = Tangle {
                strands: term
                    .strands
                    .iter()
                    .enumerate()
                    .map(|(k, s)| Strand { path: s.path.clone(), start_dec: alpha.0[k] as usize })
                    .collect(),
            };
            let coeff = HbarC::monomial(term.hbar_power, 0, 1);
            let el = skein_normalize(&ctx, &setup.basepoints, &cover, coeff)?;
            if el.is_zero() {
                continue;
            }
            mat.add_entry(alpha.clone(), SheetAssignment(term.beta.clone()), el);
        }
    }
    Ok(mat)
}

// ---------------------------------------------------------------------------
// Braid plumbing for the verification suites
// ---------------------------------------------------------------------------

/// Concatenate two base braids in time (b after a).
pub fn compose_tangles(a: &Tangle, b: &Tangle) -> Result<Tangle> {
    let kappa = a.strands.len();
    if b.strands.len() != kappa {
        return Err(Error::EndpointMismatch("kappa mismatch".into()));
    }
    let mut strands = Vec::with_capacity(kappa);
    for sa in &a.strands {
        let end = sa.path.end();
        let sb = b
            .strands
            .iter()
            .find(|s| (s.path.start() - end).norm() < 1e-9)
            .ok_or_else(|| Error::EndpointMismatch("braid endpoints do not chain".into()))?;
        let mut pts: Vec<(f64, C)> = sa.path.pts.iter().map(|(t, z)| (0.5 * t, *z)).collect();
        for (t, z) in sb.path.pts.iter().skip(1) {
            pts.push((0.5 + 0.5 * t, *z));
        }
        strands.push(Strand { path: TimedPath::new(pts), start_dec: 0 });
    }
    Ok(Tangle { strands })
}

/// Time reversal (the inverse braid).
pub fn reverse_tangle(a: &Tangle) -> Tangle {
    let mut strands: Vec<(C, Strand)> = a
        .strands
        .iter()
        .map(|s| {
            let mut pts: Vec<(f64, C)> = s.path.pts.iter().map(|(t, z)| (1.0 - t, *z)).collect();
            pts.reverse();
            (pts[0].1, Strand { path: TimedPath::new(pts), start_dec: 0 })
        })
        .collect();
    strands.sort_by(|x, y| (x.0.re, x.0.im).partial_cmp(&(y.0.re, y.0.im)).unwrap());
    Tangle { strands: strands.into_iter().map(|(_, s)| s).collect() }
}

/// Random polyline loop braid avoiding the branch/puncture disks. Strands
/// wander in disjoint time windows; an optional simultaneous swap phase at
/// the end realizes a crossing.
pub fn random_braid<R: Rng>(setup: &LiftSetup, rng: &mut R, kappa: usize, swap_allowed: bool) -> Tangle {
    let q = &setup.basepoints[..kappa];
    let mut strands = Vec::with_capacity(kappa);
    let do_swap = swap_allowed && kappa == 2 && rng.gen_bool(0.5);
    let wander_end = if do_swap { 0.82 } else { 1.0 };
    for (k, qk) in q.iter().enumerate() {
        let t0 = 0.05 + (wander_end - 0.1) * (k as f64) / (kappa as f64);
        let t1 = t0 + (wander_end - 0.1) / (kappa as f64) - 0.04;
        let m = rng.gen_range(1..4usize);
        let mut pts = vec![*qk];
        for _ in 0..m {
            pts.push(random_waypoint(setup, rng));
        }
        pts.push(*qk);
        let mut timed = vec![(0.0, *qk)];
        let inner = TimedPath::from_points(&pts, t0, t1);
        timed.extend(inner.pts);
        strands.push(Strand { path: TimedPath::new(timed), start_dec: 0 });
    }
    if do_swap {
        // simultaneous swap with front/back bulges (a sigma or its inverse)
        let (qa, qb) = (q[0], q[1]);
        let mid = (qa + qb) * 0.5;
        let skew = (qb - qa) * 0.07;
        let bulge = 0.15 * (qb - qa).norm();
        let sgn = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let pts_a = [qa, mid - skew + C::new(0.0, -sgn * bulge), qb];
        let pts_b = [qb, mid + skew + C::new(0.0, sgn * bulge), qa];
        for (k, pts) in [pts_a, pts_b].iter().enumerate() {
            let strand = &mut strands[k];
            let here = strand.path.pts.last().unwrap().1;
            strand.path.pts.push((0.86, here));
            let swap_path = TimedPath::from_points(pts, 0.86, 1.0);
            strand.path.pts.extend(swap_path.pts.into_iter().skip(1));
        }
    } else {
        for strand in strands.iter_mut() {
            let (t_last, here) = *strand.path.pts.last().unwrap();
            if t_last < 1.0 {
                strand.path.pts.push((1.0, here));
            }
        }
    }
    Tangle { strands }
}

fn random_waypoint<R: Rng>(setup: &LiftSetup, rng: &mut R) -> C {
    let bps = &setup.network.branch_points;
    loop {
        let z = if !bps.is_empty() && rng.gen_bool(0.7) {
            let b = &bps[rng.gen_range(0..bps.len())];
            b.z + Complex64::from_polar(rng.gen_range(0.25..1.6), rng.gen_range(0.0..std::f64::consts::TAU))
        } else {
            Complex64::new(rng.gen_range(-2.2..2.2), rng.gen_range(-2.2..2.2))
        };
        if z.norm() > setup.spec.chart_radius * 0.85 {
            continue;
        }
        let clear = bps.iter().all(|b| (b.z - z).norm() > 3.0 * U_R_RADIUS)
            && setup.spec.punctures.iter().all(|p| (p - z).norm() > 3.0 * U_R_RADIUS);
        if clear {
            return z;
        }
    }
}

/// Homomorphism check report.
#[derive(Debug, Default)]
pub struct HomReport {
    pub trials: usize,
    pub passes: usize,
    pub failures: Vec<String>,
    pub skipped: usize,
}

impl HomReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passes > 0
    }
}

/// For random composable pairs, check lift(a . b) = lift(a) lift(b).
pub fn verify_homomorphism<R: Rng>(
    setup: &LiftSetup,
    rng: &mut R,
    kappa: usize,
    trials: usize,
) -> Result<HomReport> {
    let mut report = HomReport::default();
    let ctx = setup.ctx();
    let mut attempts = 0;
    while report.trials < trials && attempts < trials * 12 {
        attempts += 1;
        let a = random_braid(setup, rng, kappa, true);
        let b = random_braid(setup, rng, kappa, true);
        let ab = match compose_tangles(&a, &b) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let la = match lift(setup, &a) {
            Ok(x) => x,
            Err(_) => {
                report.skipped += 1;
                continue;
            }
        };
        let lb = match lift(setup, &b) {
            Ok(x) => x,
            Err(_) => {
                report.skipped += 1;
                continue;
            }
        };
        let lab = match lift(setup, &ab) {
            Ok(x) => x,
            Err(_) => {
                report.skipped += 1;
                continue;
            }
        };
        let prod = mat_mul(&ctx, &la, &lb)?;
        report.trials += 1;
        if mat_equal(&lab, &prod) {
            report.passes += 1;
        } else {
            report.failures.push(format!(
                "trial {}: lift(a.b) != lift(a)lift(b), kappa={} ({} vs {} entries)",
                report.trials,
                kappa,
                lab.nonzero_count(),
                prod.nonzero_count()
            ));
        }
    }
    Ok(report)
}

/// lift(beta) . lift(beta^{-1}) = Id for random braids; pins the sign
/// convention of the ramification relation.
pub fn verify_involution<R: Rng>(
    setup: &LiftSetup,
    rng: &mut R,
    kappa: usize,
    trials: usize,
) -> Result<HomReport> {
    let mut report = HomReport::default();
    let ctx = setup.ctx();
    let id = MatSkein::identity(setup.spec.n, kappa);
    let mut attempts = 0;
    while report.trials < trials && attempts < trials * 12 {
        attempts += 1;
        let a = random_braid(setup, rng, kappa, false);
        let ainv = reverse_tangle(&a);
        let la = match lift(setup, &a) {
            Ok(x) => x,
            Err(_) => {
                report.skipped += 1;
                continue;
            }
        };
        let lainv = match lift(setup, &ainv) {
            Ok(x) => x,
            Err(_) => {
                report.skipped += 1;
                continue;
            }
        };
        let prod = mat_mul(&ctx, &la, &lainv)?;
        report.trials += 1;
        if mat_equal(&prod, &id) {
            report.passes += 1;
        } else {
            report.failures.push(format!("trial {}: lift(b)lift(b^-1) != Id", report.trials));
        }
    }
    Ok(report)
}
