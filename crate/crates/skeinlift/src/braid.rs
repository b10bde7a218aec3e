//! Braid skein algebra engine.
//!
//! Braids are normalized in three layers:
//!  1. combing a geometric motion into time-ordered letters: crossing letters
//!     at coincidences of the sweep order, homotopy letters at marker-ray
//!     crossings (with decorations transported to the marker);
//!  2. Hecke rewriting of crossing letters toward the totally descending
//!     order (flip + hbar * delete), trajectorywise so smoothings are pure
//!     reconnections;
//!  3. per-strand word reduction: free cancellation, erasure of branch
//!     letters on non-colliding sheets, and the ramification double-passage
//!     sign.
//!
//! The base-surface algebra is the trivial 1-sheeted cover of the same engine.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geom::{TimedPath, C};
use crate::network::{
    marker_ray_dir, walk_strand, BranchCut, CoverGeom, Marker, MarkerKind, Network, RawLetter,
};
use crate::curve::SpectralCurveSpec;
use crate::ring::HbarC;

const BASEPOINT_SNAP: f64 = 1e-7;
const STRAND_MARKER_CLEARANCE: f64 = 1e-3;
pub const MAX_REWRITE_STATES: usize = 4_000_000;

/// Ambient data for skein computations.
pub struct SkeinContext<'a> {
    pub geom: CoverGeom<'a>,
    pub markers: Vec<Marker>,
    /// Sign of the ramification double passage: -1 (default) or +1 (flipped).
    pub eq3_sign: i64,
}

impl<'a> SkeinContext<'a> {
    /// Base-surface context: punctured plane, no cuts, no branch letters.
    pub fn base(punctures: &'a [C]) -> SkeinContext<'a> {
        let markers = punctures
            .iter()
            .enumerate()
            .map(|(i, p)| Marker { pos: *p, ray_dir: marker_ray_dir(i), kind: MarkerKind::Puncture })
            .collect();
        SkeinContext { geom: CoverGeom::Trivial, markers, eq3_sign: -1 }
    }

    /// Cover context over a traced network: punctures then branch points.
    pub fn cover(spec: &'a SpectralCurveSpec, network: &'a Network, cuts: &'a [BranchCut], flipped: bool) -> Self {
        let mut markers: Vec<Marker> = spec
            .punctures
            .iter()
            .enumerate()
            .map(|(i, p)| Marker { pos: *p, ray_dir: marker_ray_dir(i), kind: MarkerKind::Puncture })
            .collect();
        let base = markers.len();
        for (k, bp) in network.branch_points.iter().enumerate() {
            markers.push(Marker { pos: bp.z, ray_dir: marker_ray_dir(base + k), kind: MarkerKind::Branch { p: bp.p } });
        }
        SkeinContext { geom: CoverGeom::Curve { spec, cuts }, markers, eq3_sign: if flipped { 1 } else { -1 } }
    }

    pub fn n_sheets(&self) -> usize {
        self.geom.n_sheets()
    }
}

/// Homotopy letter: a signed crossing of a marker ray, with the sheet
/// decoration transported to the marker (and the colliding pair for branch
/// markers).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub marker: u16,
    pub exp: i8,
    pub dec: u8,
    pub pair: Option<(u8, u8)>,
}

impl Letter {
    fn from_raw(raw: &RawLetter) -> Self {
        Letter {
            marker: raw.marker as u16,
            exp: raw.exp,
            dec: raw.dec_at_marker as u8,
            pair: raw.pair.map(|(a, b)| (a as u8, b as u8)),
        }
    }
}

/// Totally descending braid: permutation + endpoint sheets + strand words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalBraid {
    /// Start sheet per strand (strand s starts at basepoint slot s).
    pub starts: Vec<u8>,
    /// End sheet per strand (at slot perm[s]).
    pub ends: Vec<u8>,
    /// End slot per strand.
    pub perm: Vec<u8>,
    pub words: Vec<Vec<Letter>>,
}

impl NormalBraid {
    pub fn identity(decs: &[u8]) -> Self {
        let kappa = decs.len();
        NormalBraid {
            starts: decs.to_vec(),
            ends: decs.to_vec(),
            perm: (0..kappa as u8).collect(),
            words: vec![Vec::new(); kappa],
        }
    }

    pub fn kappa(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p as usize)
            && self.words.iter().all(|w| w.is_empty())
            && self.starts == self.ends
    }
}

/// Finite Z[hbar, c^{+-1}]-combination of normal braids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SkeinElement {
    pub kappa: usize,
    pub terms: BTreeMap<NormalBraid, HbarC>,
}

impl SkeinElement {
    pub fn zero(kappa: usize) -> Self {
        SkeinElement { kappa, terms: BTreeMap::new() }
    }

    pub fn identity(decs: &[u8]) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(NormalBraid::identity(decs), HbarC::one());
        SkeinElement { kappa: decs.len(), terms }
    }

    pub fn single(braid: NormalBraid, coeff: HbarC) -> Self {
        let kappa = braid.kappa();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(braid, coeff);
        }
        SkeinElement { kappa, terms }
    }

    pub fn add_term(&mut self, braid: NormalBraid, coeff: HbarC) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(braid).or_default();
        *entry += coeff;
        // drop cancelled terms eagerly
        let dead: Vec<NormalBraid> =
            self.terms.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
        for k in dead {
            self.terms.remove(&k);
        }
    }

    pub fn add(&mut self, other: &SkeinElement) {
        for (b, c) in &other.terms {
            self.add_term(b.clone(), c.clone());
        }
    }

    pub fn scaled(&self, k: &HbarC) -> SkeinElement {
        let mut out = SkeinElement::zero(self.kappa);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), c * k);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact equality of normal forms.
    pub fn equal(&self, other: &SkeinElement) -> bool {
        self.kappa == other.kappa && self.terms == other.terms
    }

    /// Endpoint data (alpha, beta) shared by all terms, if nonempty.
    pub fn endpoints(&self) -> Option<(Vec<u8>, Vec<u8>)> {
        self.terms.keys().next().map(|b| {
            let mut beta = vec![0u8; b.kappa()];
            for (s, &slot) in b.perm.iter().enumerate() {
                beta[slot as usize] = b.ends[s];
            }
            (b.starts.clone(), beta)
        })
    }
}

/// Time-ordered letter presentation of a braid, pre-normalization.
#[derive(Debug, Clone)]
pub struct LetterBraid {
    pub kappa: usize,
    pub start_decs: Vec<u8>,
    /// End sheet per trajectory.
    pub end_decs: Vec<u8>,
    /// End slot per trajectory.
    pub end_slots: Vec<usize>,
    pub events: Vec<Event>,
    pub c_power: i32,
}

#[derive(Debug, Clone)]
pub enum Event {
    /// Crossing between trajectories a and b; `a` plays the left role, and
    /// the crossing is positive when `over == a`.
    Sigma { a: usize, b: usize, over: usize },
    Ray { traj: usize, letter: Letter },
}

/// Normalize: Hecke rewriting to the descending order, then word reduction.
pub fn normalize_letterbraid(lb: &LetterBraid, coeff: HbarC, eq3_sign: i64) -> Result<SkeinElement> {
    let mut out = SkeinElement::zero(lb.kappa);
    if coeff.is_zero() {
        return Ok(out);
    }
    let sigma_idx: Vec<usize> = lb
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e, Event::Sigma { .. }))
        .map(|(i, _)| i)
        .collect();
    let mut budget = MAX_REWRITE_STATES;
    let mut deleted = vec![false; lb.events.len()];
    rewrite(lb, &sigma_idx, 0, &mut deleted, coeff, eq3_sign, &mut out, &mut budget)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn rewrite(
    lb: &LetterBraid,
    sigma_idx: &[usize],
    cursor: usize,
    deleted: &mut Vec<bool>,
    coeff: HbarC,
    eq3_sign: i64,
    out: &mut SkeinElement,
    budget: &mut usize,
) -> Result<()> {
    if *budget == 0 {
        return Err(Error::NonBraidDiagram("rewriting budget exceeded".into()));
    }
    *budget -= 1;
    let mut owners: Vec<usize> = (0..lb.kappa).collect();
    // replay ownership up to the cursor
    for &si in &sigma_idx[..cursor] {
        if deleted[si] {
            if let Event::Sigma { a, b, .. } = lb.events[si] {
                owners.swap(a, b);
            }
        }
    }
    for (k, &si) in sigma_idx.iter().enumerate().skip(cursor) {
        let (a, b, over) = match lb.events[si] {
            Event::Sigma { a, b, over } => (a, b, over),
            _ => unreachable!(),
        };
        let under = if over == a { b } else { a };
        let (so, su) = (owners[over], owners[under]);
        if so < su {
            continue; // descending, keep
        }
        // violating: flip branch keeps going; delete branch reconnects
        let positive = over == a;
        let hterm = if positive { HbarC::hbar() } else { -HbarC::hbar() };
        deleted[si] = true;
        rewrite(lb, sigma_idx, k + 1, deleted, &coeff * &hterm, eq3_sign, out, budget)?;
        deleted[si] = false;
        return rewrite(lb, sigma_idx, k + 1, deleted, coeff, eq3_sign, out, budget);
    }
    // fully descending: extract
    let mut owners: Vec<usize> = (0..lb.kappa).collect();
    let mut words: Vec<Vec<Letter>> = vec![Vec::new(); lb.kappa];
    for (i, ev) in lb.events.iter().enumerate() {
        match ev {
            Event::Sigma { a, b, .. } => {
                if deleted[i] {
                    owners.swap(*a, *b);
                }
            }
            Event::Ray { traj, letter } => {
                words[owners[*traj]].push(*letter);
            }
        }
    }
    let mut perm = vec![0u8; lb.kappa];
    let mut ends = vec![0u8; lb.kappa];
    for traj in 0..lb.kappa {
        let s = owners[traj];
        perm[s] = lb.end_slots[traj] as u8;
        ends[s] = lb.end_decs[traj];
    }
    let mut sign = 1i64;
    let words: Vec<Vec<Letter>> = words
        .into_iter()
        .map(|w| {
            let (s, r) = reduce_word(w, eq3_sign);
            sign *= s;
            r
        })
        .collect();
    let braid = NormalBraid { starts: lb.start_decs.clone(), ends, perm, words };
    out.add_term(braid, coeff.scaled(sign) * HbarC::c(lb.c_power));
    Ok(())
}

/// Reduce a strand word: free cancellation of puncture letters, erase branch
/// letters off the colliding pair, orient branch exponents positive, and
/// collapse ramification double passages with the Eq.-style sign.
pub fn reduce_word(mut w: Vec<Letter>, eq3_sign: i64) -> (i64, Vec<Letter>) {
    let mut sign = 1i64;
    loop {
        let mut changed = false;
        // erase branch letters on non-colliding sheets
        w.retain(|l| match l.pair {
            Some((x, y)) => {
                let on = l.dec == x || l.dec == y;
                if !on {
                    changed = true;
                }
                on
            }
            None => true,
        });
        // adjacent backtracks cancel freely: same lifted ray, opposite direction
        let mut i = 0;
        while i + 1 < w.len() {
            let (a, b) = (w[i], w[i + 1]);
            if a.marker == b.marker && a.pair == b.pair && a.dec == b.dec && a.exp + b.exp == 0 {
                w.remove(i + 1);
                w.remove(i);
                changed = true;
                i = i.saturating_sub(1);
            } else {
                i += 1;
            }
        }
        // orient branch exponents positive: x_d^{-1} = sign * x_{partner(d)}
        for l in w.iter_mut() {
            if let Some(p) = l.pair {
                if l.exp == -1 {
                    l.exp = 1;
                    l.dec = if l.dec == p.0 { p.1 } else { p.0 };
                    sign *= eq3_sign;
                    changed = true;
                }
            }
        }
        // double passage through the ramification point
        let mut i = 0;
        while i + 1 < w.len() {
            let (a, b) = (w[i], w[i + 1]);
            let double_pass = match (a.pair, b.pair) {
                (Some(p), Some(q)) => {
                    a.marker == b.marker
                        && p == q
                        && a.exp == 1
                        && b.exp == 1
                        && a.dec != b.dec
                        && (b.dec == p.0 || b.dec == p.1)
                        && (a.dec == p.0 || a.dec == p.1)
                }
                _ => false,
            };
            if double_pass {
                sign *= eq3_sign;
                w.remove(i + 1);
                w.remove(i);
                changed = true;
                i = i.saturating_sub(1);
            } else {
                i += 1;
            }
        }
        if !changed {
            break;
        }
    }
    (sign, w)
}

/// Canonical letter presentation of a normal braid: strand words in index
/// order, then a bubble schedule realizing the permutation with all
/// crossings descending.
pub fn canonical_letters(nb: &NormalBraid) -> LetterBraid {
    let kappa = nb.kappa();
    let mut events = Vec::new();
    for (s, word) in nb.words.iter().enumerate() {
        for l in word {
            events.push(Event::Ray { traj: s, letter: *l });
        }
    }
    let mut arr: Vec<usize> = (0..kappa).collect();
    loop {
        let mut swapped = false;
        for k in 0..kappa.saturating_sub(1) {
            let (x, y) = (arr[k], arr[k + 1]);
            if nb.perm[x] > nb.perm[y] {
                events.push(Event::Sigma { a: x, b: y, over: x.min(y) });
                arr.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    LetterBraid {
        kappa,
        start_decs: nb.starts.clone(),
        end_decs: nb.ends.clone(),
        end_slots: nb.perm.iter().map(|&p| p as usize).collect(),
        events,
        c_power: 0,
    }
}

/// Concatenate two normal braids into a letter presentation.
pub fn concat_normal(a: &NormalBraid, b: &NormalBraid) -> Result<LetterBraid> {
    let kappa = a.kappa();
    if b.kappa() != kappa {
        return Err(Error::EndpointMismatch(format!("kappa {} vs {}", kappa, b.kappa())));
    }
    for s in 0..kappa {
        let e = a.perm[s] as usize;
        if a.ends[s] != b.starts[e] {
            return Err(Error::EndpointMismatch(format!(
                "strand {} ends on sheet {} at slot {}, next braid starts on sheet {}",
                s, a.ends[s], e, b.starts[e]
            )));
        }
    }
    let la = canonical_letters(a);
    let lb = canonical_letters(b);
    let mut inv_perm_a = vec![0usize; kappa];
    for (s, &p) in a.perm.iter().enumerate() {
        inv_perm_a[p as usize] = s;
    }
    let mut events = la.events;
    for ev in lb.events {
        events.push(match ev {
            Event::Sigma { a: x, b: y, over } => Event::Sigma {
                a: inv_perm_a[x],
                b: inv_perm_a[y],
                over: inv_perm_a[over],
            },
            Event::Ray { traj, letter } => Event::Ray { traj: inv_perm_a[traj], letter },
        });
    }
    let end_slots: Vec<usize> = (0..kappa).map(|s| b.perm[a.perm[s] as usize] as usize).collect();
    let end_decs: Vec<u8> = (0..kappa).map(|s| b.ends[a.perm[s] as usize]).collect();
    Ok(LetterBraid { kappa, start_decs: a.starts.clone(), end_decs, end_slots, events, c_power: 0 })
}

/// Product of skein elements (concatenation of braids, bilinear).
pub fn compose(ctx: &SkeinContext, a: &SkeinElement, b: &SkeinElement) -> Result<SkeinElement> {
    if a.kappa != b.kappa {
        return Err(Error::EndpointMismatch(format!("kappa {} vs {}", a.kappa, b.kappa)));
    }
    let mut out = SkeinElement::zero(a.kappa);
    for (ta, ca) in &a.terms {
        for (tb, cb) in &b.terms {
            let lb = concat_normal(ta, tb)?;
            let el = normalize_letterbraid(&lb, ca * cb, ctx.eq3_sign)?;
            out.add(&el);
        }
    }
    Ok(out)
}

/// A strand of a geometric braid: timed base path plus starting sheet.
#[derive(Debug, Clone)]
pub struct Strand {
    pub path: TimedPath,
    pub start_dec: usize,
}

/// A geometric braid: kappa decorated strand motions.
#[derive(Debug, Clone)]
pub struct Tangle {
    pub strands: Vec<Strand>,
}

/// Comb a geometric tangle into its letter presentation.
pub fn comb_tangle(ctx: &SkeinContext, basepoints: &[C], tangle: &Tangle) -> Result<LetterBraid> {
    let kappa = tangle.strands.len();
    if kappa == 0 {
        return Err(Error::NonBraidDiagram("empty tangle".into()));
    }
    // slot assignment: strand k must start at basepoint k
    for (k, s) in tangle.strands.iter().enumerate() {
        if (s.path.start() - basepoints[k]).norm() > BASEPOINT_SNAP {
            return Err(Error::NonBraidDiagram(format!("strand {} does not start at its basepoint", k)));
        }
    }
    let mut end_slots = Vec::with_capacity(kappa);
    for s in &tangle.strands {
        let end = s.path.end();
        let slot = basepoints
            .iter()
            .position(|q| (q - end).norm() < BASEPOINT_SNAP)
            .ok_or_else(|| Error::NonBraidDiagram("strand does not end at a basepoint".into()))?;
        end_slots.push(slot);
    }
    // marker clearance
    for s in &tangle.strands {
        for m in &ctx.markers {
            for w in s.path.pts.windows(2) {
                if crate::geom::point_seg_dist(m.pos, w[0].1, w[1].1) < STRAND_MARKER_CLEARANCE {
                    return Err(Error::StrandThroughPuncture(m.pos));
                }
            }
        }
    }
    // walks: decorations, cut crossings, ray letters
    let mut walks = Vec::with_capacity(kappa);
    for s in &tangle.strands {
        let start_values = ctx.geom.start_values(s.path.start())?;
        let w = walk_strand(&ctx.geom, &ctx.markers, &s.path.pts, start_values, s.start_dec)?;
        walks.push(w);
    }
    let c_power: i64 = walks.iter().map(|w| w.c_sum).sum();

    // timed events
    let mut timed: Vec<(f64, u8, Event)> = Vec::new();
    for (k, w) in walks.iter().enumerate() {
        for raw in &w.letters {
            timed.push((raw.t, 1, Event::Ray { traj: k, letter: Letter::from_raw(raw) }));
        }
    }
    // crossing letters: same-sheet coincidences of the sweep coordinate
    for i in 0..kappa {
        for j in i + 1..kappa {
            sigma_events(&tangle.strands[i], &tangle.strands[j], &walks[i], &walks[j], i, j, &mut timed)?;
        }
    }
    timed.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
    let events = timed.into_iter().map(|(_, _, e)| e).collect();
    Ok(LetterBraid {
        kappa,
        start_decs: tangle.strands.iter().map(|s| s.start_dec as u8).collect(),
        end_decs: walks.iter().map(|w| w.end_dec as u8).collect(),
        end_slots,
        events,
        c_power: c_power as i32,
    })
}

fn dec_at(timeline: &[(f64, usize)], t: f64) -> usize {
    let mut dec = timeline[0].1;
    for &(tt, d) in timeline {
        if tt <= t {
            dec = d;
        } else {
            break;
        }
    }
    dec
}

fn sigma_events(
    si: &Strand,
    sj: &Strand,
    wi: &crate::network::StrandWalk,
    wj: &crate::network::StrandWalk,
    i: usize,
    j: usize,
    out: &mut Vec<(f64, u8, Event)>,
) -> Result<()> {
    // merged breakpoints
    let mut ts: Vec<f64> = si.path.pts.iter().map(|(t, _)| *t).collect();
    ts.extend(sj.path.pts.iter().map(|(t, _)| *t));
    ts.extend(wi.dec_timeline.iter().map(|(t, _)| *t));
    ts.extend(wj.dec_timeline.iter().map(|(t, _)| *t));
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let d0 = si.path.at(t0).re - sj.path.at(t0).re;
        let d1 = si.path.at(t1).re - sj.path.at(t1).re;
        if d0 == 0.0 {
            return Err(Error::NonBraidDiagram(format!("sweep-order tie at t = {}", t0)));
        }
        if d0.signum() == d1.signum() || d1 == 0.0 {
            continue;
        }
        let frac = d0 / (d0 - d1);
        let t_star = t0 + (t1 - t0) * frac;
        if dec_at(&wi.dec_timeline, t_star) != dec_at(&wj.dec_timeline, t_star) {
            continue;
        }
        let zi = si.path.at(t_star);
        let zj = sj.path.at(t_star);
        if (zi.im - zj.im).abs() < 1e-12 {
            return Err(Error::NonBraidDiagram(format!("strand collision at t = {}", t_star)));
        }
        // a = the strand that was sweep-smaller before the coincidence
        let (a, b, im_a, im_b) = if d0 < 0.0 { (i, j, zi.im, zj.im) } else { (j, i, zj.im, zi.im) };
        let over = if im_a < im_b { a } else { b };
        out.push((t_star, 0, Event::Sigma { a, b, over }));
    }
    Ok(())
}

/// Normalize a geometric tangle into the skein algebra.
pub fn skein_normalize(ctx: &SkeinContext, basepoints: &[C], tangle: &Tangle, coeff: HbarC) -> Result<SkeinElement> {
    let lb = comb_tangle(ctx, basepoints, tangle)?;
    normalize_letterbraid(&lb, coeff, ctx.eq3_sign)
}

/// Reduced homotopy word of a single strand path (with sign from the
/// ramification rules).
pub fn homotopy_reduce(ctx: &SkeinContext, path: &[(f64, C)], start_dec: usize) -> Result<(i64, Vec<Letter>)> {
    let start_values = ctx.geom.start_values(path[0].1)?;
    let walk = walk_strand(&ctx.geom, &ctx.markers, path, start_values, start_dec)?;
    let letters: Vec<Letter> = walk.letters.iter().map(Letter::from_raw).collect();
    Ok(reduce_word(letters, ctx.eq3_sign))
}

// ---------------------------------------------------------------------------
// Generator words and their canonical geometry
// ---------------------------------------------------------------------------

/// Abstract braid generators over fixed basepoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenLetter {
    /// sigma_k: slots k, k+1 swap; positive = slot-k strand in front/over.
    Sigma { k: usize, inverse: bool },
    /// Strand at `slot` loops once around puncture marker `puncture` (ccw if
    /// not inverse).
    Loop { slot: usize, puncture: usize, inverse: bool },
}

/// Letter presentation of a base-surface generator word.
pub fn letterbraid_from_word(kappa: usize, word: &[GenLetter]) -> Result<LetterBraid> {
    let mut traj_at_slot: Vec<usize> = (0..kappa).collect();
    let mut events = Vec::new();
    for g in word {
        match *g {
            GenLetter::Sigma { k, inverse } => {
                if k + 1 >= kappa {
                    return Err(Error::Invalid(format!("sigma_{} out of range for kappa {}", k + 1, kappa)));
                }
                let a = traj_at_slot[k];
                let b = traj_at_slot[k + 1];
                let over = if inverse { b } else { a };
                events.push(Event::Sigma { a, b, over });
                traj_at_slot.swap(k, k + 1);
            }
            GenLetter::Loop { slot, puncture, inverse } => {
                if slot >= kappa {
                    return Err(Error::Invalid(format!("slot {} out of range", slot)));
                }
                let letter = Letter {
                    marker: puncture as u16,
                    exp: if inverse { -1 } else { 1 },
                    dec: 0,
                    pair: None,
                };
                events.push(Event::Ray { traj: traj_at_slot[slot], letter });
            }
        }
    }
    let mut end_slots = vec![0usize; kappa];
    for (slot, &traj) in traj_at_slot.iter().enumerate() {
        end_slots[traj] = slot;
    }
    Ok(LetterBraid {
        kappa,
        start_decs: vec![0; kappa],
        end_decs: vec![0; kappa],
        end_slots,
        events,
        c_power: 0,
    })
}

/// Canonical geometric realization of a base generator word, for lifting.
/// Corridors pass parked strands on the descending side so the geometry combs
/// back to exactly the abstract word.
pub fn synthesize_word(basepoints: &[C], punctures: &[C], word: &[GenLetter]) -> Result<Tangle> {
    let kappa = basepoints.len();
    validate_basepoints(basepoints)?;
    let min_gap = min_re_gap(basepoints);
    let bulge = 0.18 * min_gap;
    let n_moves = word.len().max(1);
    let dt = 1.0 / (n_moves as f64);
    let mut pos: Vec<C> = basepoints.to_vec();
    let mut traj_at_slot: Vec<usize> = (0..kappa).collect();
    let mut paths: Vec<Vec<(f64, C)>> = (0..kappa).map(|k| vec![(0.0, basepoints[k])]).collect();
    for (step, g) in word.iter().enumerate() {
        let t0 = step as f64 * dt;
        let t1 = t0 + dt;
        match *g {
            GenLetter::Sigma { k, inverse } => {
                let a = traj_at_slot[k];
                let b = traj_at_slot[k + 1];
                let (qa, qb) = (basepoints[k], basepoints[k + 1]);
                let mid = (qa + qb) * 0.5;
                let skew = (qb - qa) * 0.07; // keeps the sweep coincidence off the samples
                // positive: slot-k strand dips to the front (smaller Im)
                let (da, db) = if inverse { (bulge, -bulge) } else { (-bulge, bulge) };
                push_path(&mut paths[a], t0, t1, &[qa, mid - skew + C::new(0.0, da), qb]);
                push_path(&mut paths[b], t0, t1, &[qb, mid + skew + C::new(0.0, db), qa]);
                pos[k] = qa;
                pos[k + 1] = qb;
                traj_at_slot.swap(k, k + 1);
            }
            GenLetter::Loop { slot, puncture, inverse } => {
                let traj = traj_at_slot[slot];
                let q = basepoints[slot];
                let w = punctures[puncture];
                let ring = loop_path(q, w, traj, basepoints, &traj_at_slot, slot, inverse, punctures);
                push_path(&mut paths[traj], t0, t1, &ring);
            }
        }
        // everyone else parks
        for (traj, p) in paths.iter_mut().enumerate() {
            if p.last().unwrap().0 < t1 - 1e-12 {
                let here = p.last().unwrap().1;
                p.push((t1, here));
            }
            let _ = traj;
        }
    }
    for p in paths.iter_mut() {
        if p.last().unwrap().0 < 1.0 - 1e-12 {
            let here = p.last().unwrap().1;
            p.push((1.0, here));
        }
    }
    Ok(Tangle {
        strands: paths.into_iter().map(|pts| Strand { path: TimedPath::new(pts), start_dec: 0 }).collect(),
    })
}

fn push_path(path: &mut Vec<(f64, C)>, t0: f64, t1: f64, pts: &[C]) {
    let tp = TimedPath::from_points(pts, t0, t1);
    for (t, z) in tp.pts {
        if t > path.last().unwrap().0 + 1e-15 {
            path.push((t, z));
        }
    }
}

/// Corridor + ring realizing a puncture loop; the corridor passes each parked
/// strand on the side that keeps crossings descending (lower index in front).
#[allow(clippy::too_many_arguments)]
fn loop_path(
    q: C,
    w: C,
    traj: usize,
    basepoints: &[C],
    traj_at_slot: &[usize],
    own_slot: usize,
    inverse: bool,
    punctures: &[C],
) -> Vec<C> {
    let mut nearest = f64::INFINITY;
    for p in punctures {
        if (p - w).norm() > 1e-12 {
            nearest = nearest.min((p - w).norm());
        }
    }
    for q2 in basepoints {
        nearest = nearest.min((q2 - w).norm());
    }
    let r = (0.25 * nearest).min(0.15);
    // corridor with index-ruled side passes at parked strands; each pass is a
    // straddling waypoint pair so the sweep coincidence is segment-interior
    let dir = w - q;
    let mut passes: Vec<(f64, usize)> = Vec::new();
    for (slot, q2) in basepoints.iter().enumerate() {
        if slot == own_slot {
            continue;
        }
        let along = ((q2 - q).re * dir.re + (q2 - q).im * dir.im) / dir.norm_sqr();
        if along > 0.02 && along < 0.98 {
            passes.push((along, slot));
        }
    }
    passes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut corridor = vec![q];
    for (along, slot) in passes {
        let q2 = basepoints[slot];
        let other = traj_at_slot[slot];
        let side = if traj < other { -1.0 } else { 1.0 }; // front = smaller Im = over
        let level = q2.im + side * 0.11 * (1.0 + 0.013 * (traj as f64 + 1.0));
        let gap = 0.31 * min_re_gap(basepoints);
        let first = if dir.re < 0.0 { gap } else { -gap };
        corridor.push(C::new(q2.re + first, level));
        corridor.push(C::new(q2.re - first, level));
        let _ = along;
    }
    // approach the ring from the direction of q
    let approach = w + crate::geom::unit(q - w) * r;
    corridor.push(approach);
    let a0 = (approach - w).arg();
    let sweep = if inverse { -2.0 * std::f64::consts::PI } else { 2.0 * std::f64::consts::PI };
    let mut pts = corridor.clone();
    pts.extend(crate::geom::arc_points(w, r, a0, sweep, 24).into_iter().skip(1));
    // return along the same corridor
    let mut back = corridor;
    back.reverse();
    pts.extend(back.into_iter().skip(1));
    pts
}

pub fn validate_basepoints(basepoints: &[C]) -> Result<()> {
    for (i, a) in basepoints.iter().enumerate() {
        for b in basepoints.iter().skip(i + 1) {
            if (a.re - b.re).abs() < 1e-9 {
                return Err(Error::Invalid(
                    "basepoints must have pairwise distinct real parts, ordered left to right".into(),
                ));
            }
        }
    }
    for w in basepoints.windows(2) {
        if w[0].re >= w[1].re {
            return Err(Error::Invalid("basepoints must be sorted by real part".into()));
        }
    }
    Ok(())
}

fn min_re_gap(basepoints: &[C]) -> f64 {
    let mut gap = f64::INFINITY;
    for w in basepoints.windows(2) {
        gap = gap.min(w[1].re - w[0].re);
    }
    if gap.is_finite() {
        gap
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_ctx() -> SkeinContext<'static> {
        SkeinContext { geom: CoverGeom::Trivial, markers: Vec::new(), eq3_sign: -1 }
    }

    fn nf_word(kappa: usize, word: &[GenLetter]) -> SkeinElement {
        let lb = letterbraid_from_word(kappa, word).unwrap();
        normalize_letterbraid(&lb, HbarC::one(), -1).unwrap()
    }

    fn sigma(k: usize) -> GenLetter {
        GenLetter::Sigma { k, inverse: false }
    }

    fn sigma_inv(k: usize) -> GenLetter {
        GenLetter::Sigma { k, inverse: true }
    }

    #[test]
    fn hecke_relation_sigma_squared() {
        // sigma_1^2 = 1 + hbar sigma_1
        let sq = nf_word(2, &[sigma(0), sigma(0)]);
        let one = SkeinElement::identity(&[0, 0]);
        let s = nf_word(2, &[sigma(0)]);
        let mut expected = one.clone();
        expected.add(&s.scaled(&HbarC::hbar()));
        assert!(sq.equal(&expected), "got {:?}", sq);
    }

    #[test]
    fn unit_law() {
        let ctx = base_ctx();
        let s = nf_word(2, &[sigma(0)]);
        let e = SkeinElement::identity(&[0, 0]);
        assert!(compose(&ctx, &e, &s).unwrap().equal(&s));
        assert!(compose(&ctx, &s, &e).unwrap().equal(&s));
    }

    #[test]
    fn sigma_inverse_cancels() {
        let ss = nf_word(2, &[sigma(0), sigma_inv(0)]);
        assert!(ss.equal(&SkeinElement::identity(&[0, 0])));
        // and the other order
        let ss2 = nf_word(2, &[sigma_inv(0), sigma(0)]);
        assert!(ss2.equal(&SkeinElement::identity(&[0, 0])));
    }

    #[test]
    fn sigma_vs_inverse_differ_by_hbar() {
        // sigma^{-1} = sigma - hbar
        let si = nf_word(2, &[sigma_inv(0)]);
        let s = nf_word(2, &[sigma(0)]);
        let mut expected = s.clone();
        expected.add(&SkeinElement::identity(&[0, 0]).scaled(&-HbarC::hbar()));
        assert!(si.equal(&expected));
        assert!(!s.equal(&si));
    }

    #[test]
    fn braid_relation_in_quotient() {
        // sigma1 sigma2 sigma1 = sigma2 sigma1 sigma2 (group relation survives)
        let a = nf_word(3, &[sigma(0), sigma(1), sigma(0)]);
        let b = nf_word(3, &[sigma(1), sigma(0), sigma(1)]);
        assert!(a.equal(&b));
    }

    #[test]
    fn loop_letters_survive() {
        let w = nf_word(1, &[GenLetter::Loop { slot: 0, puncture: 0, inverse: false }]);
        assert_eq!(w.terms.len(), 1);
        let (b, c) = w.terms.iter().next().unwrap();
        assert!(c.is_one());
        assert_eq!(b.words[0].len(), 1);
        // loop then inverse cancels
        let e = nf_word(
            1,
            &[
                GenLetter::Loop { slot: 0, puncture: 0, inverse: false },
                GenLetter::Loop { slot: 0, puncture: 0, inverse: true },
            ],
        );
        assert!(e.equal(&SkeinElement::identity(&[0])));
    }

    #[test]
    fn associativity_randomized() {
        use rand::Rng;
        use rand::SeedableRng;
        let ctx = base_ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let mut words: Vec<Vec<GenLetter>> = Vec::new();
            for _ in 0..3 {
                let len = rng.gen_range(0..4);
                let w: Vec<GenLetter> = (0..len)
                    .map(|_| {
                        let k = rng.gen_range(0..2);
                        if rng.gen_bool(0.5) {
                            sigma(k)
                        } else {
                            sigma_inv(k)
                        }
                    })
                    .collect();
                words.push(w);
            }
            let x = nf_word(3, &words[0]);
            let y = nf_word(3, &words[1]);
            let z = nf_word(3, &words[2]);
            let xy_z = compose(&ctx, &compose(&ctx, &x, &y).unwrap(), &z).unwrap();
            let x_yz = compose(&ctx, &x, &compose(&ctx, &y, &z).unwrap()).unwrap();
            assert!(xy_z.equal(&x_yz));
        }
    }

    #[test]
    fn ramification_double_passage() {
        // branch letter rules: x * x = -1, x^{-1} = -x, double rewrite returns +1
        let pair = Some((0u8, 1u8));
        let x_pos = Letter { marker: 0, exp: 1, dec: 0, pair };
        let x_next = Letter { marker: 0, exp: 1, dec: 1, pair };
        let (s, w) = reduce_word(vec![x_pos, x_next], -1);
        assert_eq!(s, -1);
        assert!(w.is_empty());
        // x^{-1} x^{-1}: (-1)^2 from orientation, then -1 from the pair: net -1
        let xm = Letter { marker: 0, exp: -1, dec: 0, pair };
        let xm2 = Letter { marker: 0, exp: -1, dec: 1, pair };
        let (s2, w2) = reduce_word(vec![xm, xm2], -1);
        assert_eq!(s2, -1);
        assert!(w2.is_empty());
        // involution: applying the orientation rule twice is the identity
        let (s3, w3) = reduce_word(vec![xm], -1);
        let (s4, _) = reduce_word(w3.clone(), -1);
        assert_eq!(s3 * s3, 1);
        assert_eq!(s4, 1);
        // off-pair letters are erased with +1
        let off = Letter { marker: 0, exp: 1, dec: 2, pair };
        let (s5, w5) = reduce_word(vec![off], -1);
        assert_eq!(s5, 1);
        assert!(w5.is_empty());
    }

    #[test]
    fn geometric_sigma_matches_word() {
        // synthesized sigma_1 combs to a single crossing with the right sign
        let q = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
        let tangle = synthesize_word(&q, &[], &[sigma(0)]).unwrap();
        let ctx = base_ctx();
        let lb = comb_tangle(&ctx, &q, &tangle).unwrap();
        let n_sigma = lb.events.iter().filter(|e| matches!(e, Event::Sigma { .. })).count();
        assert_eq!(n_sigma, 1);
        let got = normalize_letterbraid(&lb, HbarC::one(), -1).unwrap();
        let want = nf_word(2, &[sigma(0)]);
        assert!(got.equal(&want));
        // and sigma^2 geometrically
        let tangle2 = synthesize_word(&q, &[], &[sigma(0), sigma(0)]).unwrap();
        let got2 = skein_normalize(&ctx, &q, &tangle2, HbarC::one()).unwrap();
        let want2 = nf_word(2, &[sigma(0), sigma(0)]);
        assert!(got2.equal(&want2));
    }

    #[test]
    fn geometric_loop_matches_word() {
        let q = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
        let punctures = [C::new(-1.5, 0.4)];
        let word = [GenLetter::Loop { slot: 1, puncture: 0, inverse: false }];
        let tangle = synthesize_word(&q, &punctures, &word).unwrap();
        let ctx = SkeinContext::base(&punctures);
        let got = skein_normalize(&ctx, &q, &tangle, HbarC::one()).unwrap();
        let lb = letterbraid_from_word(2, &word).unwrap();
        let want = normalize_letterbraid(&lb, HbarC::one(), -1).unwrap();
        assert!(got.equal(&want), "got {:?} want {:?}", got, want);
    }
}
