mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reslab::charts::{cart_from_elements, delaunay_from_elements, cart_from_resonance, CartState, ResonanceState};
use reslab::elements::OrbitalElements;
use reslab::hamiltonian::*;
use reslab::{MassConfig, ModelKind};

/// Physical energy from absolute barycentric-free sums, written without the
/// reduced-mass split used by the library.
fn textbook_energy(cs: &CartState, mc: &MassConfig) -> f64 {
    let mu = mc.mu;
    let n = cs.n();
    let mut h = 0.0;
    let mut total = [0.0, 0.0];
    for i in 0..n {
        let m = mu * mc.mbar[i];
        let p = [mu * cs.p[i][0], mu * cs.p[i][1]];
        total[0] += p[0];
        total[1] += p[1];
        h += (p[0] * p[0] + p[1] * p[1]) / (2.0 * m) - mc.m0 * m / cs.q[i][0].hypot(cs.q[i][1]);
        for j in i + 1..n {
            let r = (cs.q[i][0] - cs.q[j][0]).hypot(cs.q[i][1] - cs.q[j][1]);
            h -= m * mu * mc.mbar[j] / r;
        }
    }
    if mc.model == ModelKind::FullProblem {
        h += (total[0] * total[0] + total[1] * total[1]) / (2.0 * mc.m0);
    }
    h / mu
}

fn shifted(rs: &ResonanceState, f: impl Fn(&mut ResonanceState)) -> ResonanceState {
    let mut out = *rs;
    f(&mut out);
    out
}

#[test]
fn energy_matches_textbook_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let mc = random_mass(&mut rng, 3);
        let cs = cart_from_elements(&random_elements(&mut rng, 3), &mc).unwrap();
        let lib = total_energy(&cs, &mc).unwrap();
        let oracle = textbook_energy(&cs, &mc);
        assert!((lib - oracle).abs() < 1e-11 * oracle.abs().max(1.0), "{lib} vs {oracle} ({:?})", mc.model);
    }
}

#[test]
fn kepler_part_agrees_between_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let mc = random_mass(&mut rng, 3);
        let rs = random_resonance(&mut rng, &mc);
        let cs = cart_from_resonance(&rs, &mc).unwrap();
        let (a, b) = (eval_f_kep(&rs, &mc), f_kep_cartesian(&cs, &mc));
        assert!((a - b).abs() < 1e-12 * a.abs());
    }
}

#[test]
fn averaging_integral_is_small_for_circular_and_eccentric_orbits() {
    let mc = MassConfig::new(1.0, vec![1.0, 0.7, 1.3, 0.9], 1e-5, ModelKind::FullProblem).unwrap();
    let mk = |e4: f64| -> Vec<OrbitalElements> {
        let mut out: Vec<_> = [1.0, 1.6, 2.5].iter().map(|&a| OrbitalElements::new(a, 0.0, 0.3 * a, 0.0).unwrap()).collect();
        out.push(OrbitalElements::new(4.4, e4, 1.1, 0.7).unwrap());
        out
    };
    assert!(indirect_average_check(&mc, &mk(0.0), 64).unwrap() < 1e-12);
    assert!(indirect_average_check(&mc, &mk(0.2), 64).unwrap() < 1e-10);
}

#[test]
fn secular_weight_is_linear_in_inner_masses() {
    let a = [1.0, 1.6, 2.5, 4.4];
    let mc = MassConfig::new(1.0, vec![1.0, 0.7, 1.3, 0.9], 1e-5, ModelKind::FixedCenter).unwrap();
    let k = secular_callisto_coefficient(&mc, a).unwrap();
    let doubled = MassConfig { mbar: vec![2.0, 1.4, 2.6, 0.9], ..mc.clone() };
    assert!(k > 0.0);
    assert!((secular_callisto_coefficient(&doubled, a).unwrap() - 2.0 * k).abs() < 1e-14);
    let light = MassConfig { mbar: vec![1e-300, 1e-300, 1e-300, 0.9], ..mc };
    assert!(secular_callisto_coefficient(&light, a).unwrap() < 1e-298);
    assert!(secular_callisto_coefficient(&doubled, [1.0, 0.5, 2.5, 4.4]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kepler_part_ignores_angles_and_slow_actions(seed in any::<u64>(), s in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = random_mass(&mut rng, 3);
        let rs = random_resonance(&mut rng, &mc);
        let k = rng.gen_range(0..3);
        let moved = shifted(&rs, |r| { r.delta[k] += s; r.eta[k] += s; });
        prop_assert_eq!(eval_f_kep(&rs, &mc), eval_f_kep(&moved, &mc));
    }

    #[test]
    fn resonant_part_ignores_outer_angles(seed in any::<u64>(), s in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = random_mass(&mut rng, 3);
        let els: Vec<OrbitalElements> = (0..3)
            .map(|i| {
                let a = 4f64.powf(i as f64 / 3.0) * rng.gen_range(0.97..1.03);
                OrbitalElements::new(a, rng.gen_range(0.0..0.2), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)).unwrap()
            })
            .collect();
        let rs = ResonanceState::from_delaunay(&delaunay_from_elements(&els, &mc)).unwrap();
        let base = eval_f_res(&rs, &mc).unwrap();
        let moved = eval_f_res(&shifted(&rs, |r| { r.eta[2] += s; r.delta[2] += s; }), &mc).unwrap();
        prop_assert!((base - moved).abs() <= 1e-13 * base.abs().max(1e-300));
    }

    #[test]
    fn perturbation_is_linear_in_mu(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = random_mass(&mut rng, 3);
        let cs = cart_from_elements(&random_elements(&mut rng, 3), &mc).unwrap();
        let one = eval_f_pert(&cs, &mc).unwrap();
        let two = eval_f_pert(&cs, &mc.with_mu(2.0 * mc.mu)).unwrap();
        prop_assert!((two - 2.0 * one).abs() <= 1e-14 * one.abs());
    }

    #[test]
    fn energy_is_rotation_invariant(seed in any::<u64>(), angle in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = random_mass(&mut rng, 3);
        let cs = cart_from_elements(&random_elements(&mut rng, 3), &mc).unwrap();
        let (a, b) = (total_energy(&cs, &mc).unwrap(), total_energy(&cs.rotated(angle), &mc).unwrap());
        prop_assert!((a - b).abs() < 1e-12 * a.abs());
    }
}
