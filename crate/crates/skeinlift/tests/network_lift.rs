//! Integration checks: wall tracing against closed forms, cut conditions,
//! sheet transport, and the detour/exchange lift on the square-root curve.

use num_complex::Complex64;
use skeinlift::braid::{SkeinElement, Strand, Tangle};
use skeinlift::curve::{discriminant_zeros, SpectralCurveSpec};
use skeinlift::geom::TimedPath;
use skeinlift::lift::{
    detect_events, lift, verify_involution, EventKind, LiftSetup,
};
use skeinlift::matskein::{mat_equal, mat_mul, MatSkein, SheetAssignment};
use skeinlift::network::{build_network_with_cuts, seed_directions, verify_cut_conditions, WallOpts};
use skeinlift::poly::{Poly, RationalFn};
use skeinlift::C;

fn c(re: f64, im: f64) -> C {
    Complex64::new(re, im)
}

/// P = p^2 - z, puncture at infinity.
fn sqrt_curve() -> SpectralCurveSpec {
    SpectralCurveSpec::new(
        2,
        vec![RationalFn::zero(), RationalFn::poly(Poly::from_real(&[0.0, -1.0]))],
        vec![],
        c(0.4, -1.1),
        6.0,
    )
    .unwrap()
}

fn basepoints1() -> Vec<C> {
    vec![c(0.4, -1.1)]
}

#[test]
fn square_root_network_shape() {
    let spec = sqrt_curve();
    let q = basepoints1();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    assert_eq!(network.branch_points.len(), 1);
    assert_eq!(network.walls.len(), 3);
    assert_eq!(network.joints.len(), 0);
    // seed directions 0, 2pi/3, 4pi/3 from the local model
    let dirs = seed_directions(&network.branch_points[0]);
    let expect = [0.0, 2.0 * std::f64::consts::PI / 3.0, 4.0 * std::f64::consts::PI / 3.0];
    for (d, e) in dirs.iter().zip(expect.iter()) {
        assert!((d - e).abs() < 1e-3, "seed dir {} vs {}", d, e);
    }
    // f strictly increasing along every wall
    for w in &network.walls {
        for fw in w.f_values.windows(2) {
            assert!(fw[1] > fw[0], "f not increasing: {} -> {}", fw[0], fw[1]);
        }
    }
    // one cut, conditions (1)-(5)
    assert_eq!(network.cuts.len(), 1);
    let report = verify_cut_conditions(&spec, &network, &network.cuts, &q);
    assert!(report.all(), "{report:?}");
}

fn constant_strand(z: C) -> Strand {
    Strand { path: TimedPath::constant(z, 0.0, 1.0), start_dec: 0 }
}

#[test]
fn identity_braid_lifts_to_identity() {
    let spec = sqrt_curve();
    let q = basepoints1();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    let tangle = Tangle { strands: vec![constant_strand(q[0])] };
    let events = detect_events(&setup, &tangle).unwrap();
    assert!(events.is_empty());
    let m = lift(&setup, &tangle).unwrap();
    assert!(mat_equal(&m, &MatSkein::identity(2, 1)));
}

/// A kappa = 1 loop from q around the branch point, counterclockwise.
fn bp_loop(q: C, samples: usize) -> Tangle {
    let r = q.norm();
    let a0 = q.arg();
    let pts: Vec<C> = (0..=samples)
        .map(|k| Complex64::from_polar(r, a0 + std::f64::consts::TAU * (k as f64) / (samples as f64)))
        .collect();
    Tangle { strands: vec![Strand { path: TimedPath::from_points(&pts, 0.0, 1.0), start_dec: 0 }] }
}

#[test]
fn bp_loop_events_and_transport() {
    let spec = sqrt_curve();
    let q = basepoints1();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    let tangle = bp_loop(q[0], 60);
    let events = detect_events(&setup, &tangle).unwrap();
    let detours = events.iter().filter(|e| matches!(e.kind, EventKind::Detour { .. })).count();
    assert_eq!(detours, 3, "a loop around the branch point crosses all three walls");
}

/// The central self-consistency identity at kappa = 1: a contractible loop
/// (on the plane every loop is contractible) must lift to the identity
/// matrix once all detour terms are resolved.
#[test]
fn bp_loop_lifts_to_identity() {
    let spec = sqrt_curve();
    let q = basepoints1();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    let tangle = bp_loop(q[0], 60);
    let m = lift(&setup, &tangle).unwrap();
    let id = MatSkein::identity(2, 1);
    if !mat_equal(&m, &id) {
        for ((a, b), v) in &m.entries {
            eprintln!("entry {:?} -> {:?}: {} terms", a.0, b.0, v.terms.len());
            for (nb, coeff) in &v.terms {
                eprintln!("   coeff {} words {:?} starts {:?} ends {:?}", coeff, nb.words, nb.starts, nb.ends);
            }
        }
        panic!("branch-point loop does not lift to the identity");
    }
}

#[test]
fn involution_small() {
    let spec = sqrt_curve();
    let q = basepoints1();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let report = verify_involution(&setup, &mut rng, 1, 8).unwrap();
    assert!(report.all_passed(), "{:?}", report.failures);
}

#[test]
fn composite_homomorphism_smoke() {
    let spec = sqrt_curve();
    let q = basepoints1();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    let ctx = setup.ctx();
    let a = bp_loop(q[0], 48);
    let b = bp_loop(q[0], 36);
    let ab = skeinlift::lift::compose_tangles(&a, &b).unwrap();
    let la = lift(&setup, &a).unwrap();
    let lb = lift(&setup, &b).unwrap();
    let lab = lift(&setup, &ab).unwrap();
    let prod = mat_mul(&ctx, &la, &lb).unwrap();
    assert!(mat_equal(&lab, &prod), "homomorphism fails on branch-point loops");
}

#[test]
fn pure_transport_row_structure() {
    // a path crossing only the cut (no walls): one nonzero entry per row,
    // coefficient +-c^n
    let spec = sqrt_curve();
    let q = basepoints1();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    let tangle = bp_loop(q[0], 60);
    let events = detect_events(&setup, &tangle).unwrap();
    // disable all events: pure transport
    let m = skeinlift::lift::lift_with_events(&setup, &tangle, &[]).unwrap();
    let _ = events;
    for alpha in SheetAssignment::enumerate(2, 1) {
        let row: Vec<_> = m.entries.iter().filter(|((a, _), _)| *a == alpha).collect();
        assert_eq!(row.len(), 1, "one nonzero entry per row");
        let (_, v) = row[0];
        assert_eq!(v.terms.len(), 1);
        let coeff = v.terms.values().next().unwrap();
        let monomials: Vec<_> = coeff.iter().collect();
        assert_eq!(monomials.len(), 1);
        let ((h, _cpow), int) = monomials[0];
        assert_eq!(*h, 0);
        assert!(*int == 1 || *int == -1);
    }
    let _ = SkeinElement::zero(1);
}

/// P = p^2 - (z^2 - 1): branch points at +-1, puncture at infinity.
fn two_bp_curve() -> SpectralCurveSpec {
    SpectralCurveSpec::new(
        2,
        vec![RationalFn::zero(), RationalFn::poly(Poly::from_real(&[1.0, 0.0, -1.0]))],
        vec![],
        c(0.3, -1.4),
        6.0,
    )
    .unwrap()
}

#[test]
fn two_bp_network_and_involution() {
    let spec = two_bp_curve();
    let q = vec![c(0.3, -1.4)];
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    assert_eq!(network.branch_points.len(), 2);
    assert_eq!(network.walls.len(), 6);
    assert_eq!(network.cuts.len(), 2);
    let report = verify_cut_conditions(&spec, &network, &network.cuts, &q);
    assert!(report.all(), "{report:?}");
    let setup = LiftSetup::new(&spec, &network, q.clone());
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let report = verify_involution(&setup, &mut rng, 1, 6).unwrap();
    assert!(report.all_passed(), "{:?}", report.failures);
}

#[test]
fn cubic_monodromy_transpositions() {
    // P = p^3 - 3p + z: branch points at z = +-2
    let spec = SpectralCurveSpec::new(
        3,
        vec![
            RationalFn::zero(),
            RationalFn::poly(Poly::from_real(&[-3.0])),
            RationalFn::poly(Poly::from_real(&[0.0, 1.0])),
        ],
        vec![],
        c(0.3, -3.5),
        12.0,
    )
    .unwrap();
    let bps = discriminant_zeros(&spec).unwrap();
    assert_eq!(bps.len(), 2);
    for bp in &bps {
        // loop around one branch point from the basepoint
        let center = bp.z;
        let r = 1.0;
        let mut pts = vec![spec.basepoint];
        let approach = center + skeinlift::geom::unit(spec.basepoint - center) * r;
        pts.push(approach);
        let a0 = (approach - center).arg();
        for k in 1..=40 {
            pts.push(center + Complex64::from_polar(r, a0 + std::f64::consts::TAU * (k as f64) / 40.0));
        }
        pts.push(spec.basepoint);
        let sp = skeinlift::curve::continue_sheets(&spec, &pts).unwrap();
        let (i, j) = bp.colliding_pair;
        assert_eq!(sp.permutation, skeinlift::curve::Perm::transposition(3, i, j));
    }
}

fn basepoints2() -> Vec<C> {
    vec![c(0.4, -1.1), c(1.35, -0.85)]
}

#[test]
fn kappa2_identity_and_dims() {
    let spec = sqrt_curve();
    let q = basepoints2();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    let tangle = Tangle { strands: vec![constant_strand(q[0]), constant_strand(q[1])] };
    let m = lift(&setup, &tangle).unwrap();
    assert_eq!(m.dim(), 4);
    assert!(mat_equal(&m, &MatSkein::identity(2, 2)));
}

#[test]
fn kappa2_homomorphism_smoke() {
    let spec = sqrt_curve();
    let q = basepoints2();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let report = skeinlift::lift::verify_homomorphism(&setup, &mut rng, 2, 4).unwrap();
    assert!(report.all_passed(), "{:?} (skipped {})", report.failures, report.skipped);
}

/// Construct a kappa=2 braid with a deliberate exchange event: strand 2
/// crosses the forward flow line through strand 1's parked position.
#[test]
fn exchange_event_carries_hbar() {
    let spec = sqrt_curve();
    let q = basepoints2();
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    // flow line through q1 forward
    let fiber = skeinlift::curve::roots_at(&spec, q[0]).unwrap();
    let flow = skeinlift::network::trace_flow_line(&spec, q[0], fiber.roots.clone(), (0, 1), 1.2, 0.01).unwrap();
    let target = flow.points[flow.points.len() / 2];
    let tangent = skeinlift::geom::unit(
        flow.points[flow.points.len() / 2 + 1] - flow.points[flow.points.len() / 2 - 1],
    );
    let perp = tangent * c(0.0, 1.0);
    // strand 2: dip across the flow line and back
    let p0 = q[1];
    let pts = vec![p0, target + perp * 0.3, target - perp * 0.3, p0];
    let tangle = Tangle {
        strands: vec![
            constant_strand(q[0]),
            Strand { path: TimedPath::from_points(&pts, 0.0, 1.0), start_dec: 0 },
        ],
    };
    let events = detect_events(&setup, &tangle).unwrap();
    let n_exchange = events.iter().filter(|e| matches!(e.kind, EventKind::Exchange { .. })).count();
    assert!(n_exchange >= 1, "expected an exchange event, got {:?}", events.len());
    // every exchange term carries exactly hbar^1 per diagonal vertex used
    let alphas = SheetAssignment::enumerate(2, 2);
    let mut saw_exchange_term = false;
    for alpha in &alphas {
        for term in skeinlift::lift::lift_terms(&setup, &tangle, &events, alpha).unwrap() {
            let n_ex = term
                .events_used
                .iter()
                .filter(|&&e| matches!(events[e].kind, EventKind::Exchange { .. }))
                .count() as u32;
            assert_eq!(term.hbar_power, n_ex);
            if n_ex > 0 {
                saw_exchange_term = true;
            }
        }
    }
    assert!(saw_exchange_term, "no applicable exchange term found");
}
