use num_complex::Complex64;
use skeinlift::braid::Tangle;
use skeinlift::curve::SpectralCurveSpec;
use skeinlift::lift::{compose_tangles, lift, random_braid, LiftSetup};
use skeinlift::matskein::{mat_equal, mat_mul};
use skeinlift::network::{build_network_with_cuts, WallOpts};
use skeinlift::poly::{Poly, RationalFn};
use skeinlift::C;
use rand::SeedableRng;

fn c(re: f64, im: f64) -> C { Complex64::new(re, im) }

#[test]
fn dbg_kappa2() {
    let spec = SpectralCurveSpec::new(
        2,
        vec![RationalFn::zero(), RationalFn::poly(Poly::from_real(&[0.0, -1.0]))],
        vec![], c(0.4, -1.1), 6.0,
    ).unwrap();
    let q = vec![c(0.4, -1.1), c(1.35, -0.85)];
    let network = build_network_with_cuts(&spec, 0, &q, &WallOpts::default()).unwrap();
    let setup = LiftSetup::new(&spec, &network, q.clone());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let mut n_err = std::collections::BTreeMap::<String, usize>::new();
    for trial in 0..40 {
        let a: Tangle = random_braid(&setup, &mut rng, 2, true);
        let b = random_braid(&setup, &mut rng, 2, true);
        let ab = match compose_tangles(&a, &b) { Ok(x) => x, Err(e) => { *n_err.entry(format!("compose: {e}")).or_default() += 1; continue } };
        let la = match lift(&setup, &a) { Ok(x) => x, Err(e) => { *n_err.entry(format!("{e}").chars().take(60).collect()).or_default() += 1; continue } };
        let lb = match lift(&setup, &b) { Ok(x) => x, Err(e) => { *n_err.entry(format!("{e}").chars().take(60).collect()).or_default() += 1; continue } };
        let lab = match lift(&setup, &ab) { Ok(x) => x, Err(e) => { *n_err.entry(format!("{e}").chars().take(60).collect()).or_default() += 1; continue } };
        let prod = mat_mul(&setup.ctx(), &la, &lb).unwrap();
        if !mat_equal(&lab, &prod) {
            eprintln!("TRIAL {trial} MISMATCH");
            for ((al, be), v) in &lab.entries {
                let other = prod.get(al, be);
                let same = other.map(|o| o.equal(v)).unwrap_or(false);
                if !same {
                    eprintln!(" lab entry {:?}->{:?}: {} terms", al.0, be.0, v.terms.len());
                    for (nb, cf) in &v.terms { eprintln!("    {} * perm {:?} words {:?}", cf, nb.perm, nb.words); }
                    if let Some(o) = other { for (nb, cf) in &o.terms { eprintln!("    PROD has {} * perm {:?} words {:?}", cf, nb.perm, nb.words); } } else { eprintln!("    PROD has nothing"); }
                }
            }
            for ((al, be), v) in &prod.entries {
                if lab.get(al, be).is_none() {
                    eprintln!(" prod-only entry {:?}->{:?}: {} terms", al.0, be.0, v.terms.len());
                    for (nb, cf) in &v.terms { eprintln!("    {} * perm {:?} words {:?} starts {:?} ends {:?}", cf, nb.perm, nb.words, nb.starts, nb.ends); }
                }
            }
            break;
        } else { eprintln!("trial {trial} ok"); }
    }
    eprintln!("errors: {:?}", n_err);
    panic!("done");
}
