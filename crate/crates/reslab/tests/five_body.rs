use proptest::prelude::*;
use reslab::charts::CallistoState;
use reslab::families::FamilyLabel;
use reslab::five_body::*;
use reslab::hamiltonian::{eval_f_pert, total_energy};
use reslab::{MassConfig, ModelKind};

fn config(mbar4: f64, model: ModelKind) -> FiveBodyConfig {
    let mc = MassConfig::new(1.0, vec![1.0, 1.0, 1.0, mbar4], 1e-6, model).unwrap();
    FiveBodyConfig::new(mc, 1.0, 2.0, 0.1).unwrap()
}

fn with_outer_eccentricity(cs: &CallistoState, e4: f64) -> CallistoState {
    // G4 drops by rho^2 / 2 and the total Z3' with it
    let rho2 = 2.0 * cs.big_lambda4 * (1.0 - (1.0 - e4 * e4).sqrt());
    let mut out = CallistoState { xi4: rho2.sqrt(), eta4: 0.0, ..*cs };
    out.inner.z[2] -= 0.5 * rho2;
    out
}

#[test]
fn intermediate_orbit_is_circular_outside() {
    for model in [ModelKind::FixedCenter, ModelKind::FullProblem] {
        let cfg = FiveBodyConfig::galilean(model);
        let cs = intermediate_orbit(&cfg, FamilyLabel::stable(), 0.01).unwrap();
        assert_eq!((cs.xi4, cs.eta4), (0.0, 0.0));
        assert!(herman_residual(&cfg, &cs).unwrap() < 1e-12);
        assert!(herman_residual(&cfg, &with_outer_eccentricity(&cs, 0.2)).unwrap() < 1e-10);
    }
}

#[test]
fn light_outer_body_decouples() {
    let base = config(1.0, ModelKind::FullProblem);
    let x = callisto_to_cart(&intermediate_orbit(&base, FamilyLabel::stable(), 0.01).unwrap(), &base.mc).unwrap();
    let inner = reslab::charts::CartState { q: x.q[..3].to_vec(), p: x.p[..3].to_vec() };
    let inner_pert = eval_f_pert(&inner, &base.mc.inner()).unwrap();
    let coupling: Vec<f64> = [1e-2, 1e-4, 0.0]
        .iter()
        .map(|&m4| {
            let mc = MassConfig { mbar: vec![1.0, 1.0, 1.0, m4], ..base.mc.clone() };
            // same positions and velocities; the rescaled momentum carries the mass
            let mut y = x.clone();
            y.p[3] = [m4 * x.p[3][0], m4 * x.p[3][1]];
            eval_f_pert(&y, &mc).unwrap() - inner_pert
        })
        .collect();
    assert_eq!(coupling[2], 0.0);
    let ratio = coupling[0] / coupling[1];
    assert!((ratio - 100.0).abs() < 1e-6 * 100.0, "coupling {coupling:?}");
}

#[test]
fn outer_precession_is_linear_in_mu() {
    let cfg = FiveBodyConfig::galilean(ModelKind::FixedCenter);
    let w1 = callisto_normal_frequency(&cfg).unwrap();
    let w2 = callisto_normal_frequency(&cfg.with_mu(2e-6)).unwrap();
    assert!(w1 > 0.0);
    assert!((w2 - 2.0 * w1).abs() < 1e-15 * w1.max(1.0));
}

#[test]
fn energy_is_chart_independent() {
    let cfg = FiveBodyConfig::galilean(ModelKind::FullProblem);
    let model = build_five_body(&cfg).unwrap();
    let cs = with_outer_eccentricity(&intermediate_orbit(&cfg, FamilyLabel::stable(), 0.01).unwrap(), 0.05);
    let a = callisto_energy(&model, &cs).unwrap();
    let cart = callisto_to_cart(&cs, &cfg.mc).unwrap();
    let back = CallistoState::from_delaunay(&reslab::charts::delaunay_from_cart(&cart, &cfg.mc).unwrap()).unwrap();
    let b = callisto_energy(&model, &back).unwrap();
    assert!((a - b).abs() < 1e-11 * a.abs());
    assert!((a - total_energy(&cart, &cfg.mc).unwrap()).abs() == 0.0);
}

#[test]
fn bad_configurations_are_rejected() {
    let mc4 = MassConfig::new(1.0, vec![1.0; 4], 1e-6, ModelKind::FixedCenter).unwrap();
    assert!(FiveBodyConfig::new(mc4.clone(), 1.0, 1.1, 0.1).is_err(), "orbits overlap");
    assert!(FiveBodyConfig::new(mc4.clone(), 1.0, 4f64.cbrt(), 0.01).is_err(), "2:1 with body 3");
    assert!(FiveBodyConfig::new(mc4.inner(), 1.0, 2.0, 0.1).is_err(), "three satellites");
    assert!(FiveBodyConfig::new(mc4, 1.0, 2.0, 1.5).is_err(), "eccentricity bound");
}

#[test]
fn short_run_stays_near_the_torus() {
    let cfg = FiveBodyConfig::galilean(ModelKind::FixedCenter);
    let opts = TorusOptions { periods: 500, naff_samples: 2048, continue_inner: false, ..TorusOptions::default() };
    let report = verify_elliptic_2torus(&cfg, &opts).unwrap();
    assert!(report.kappa > 0.0);
    assert!(report.e4_min > 0.5e-3 && report.e4_max < 2e-3, "{report:?}");
    assert!(report.max_rel_energy < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn secular_weight_is_positive(
        m in prop::array::uniform4(0.05f64..5.0),
        a4 in 1.7f64..6.0,
        full in any::<bool>(),
    ) {
        let model = if full { ModelKind::FullProblem } else { ModelKind::FixedCenter };
        let mc = MassConfig::new(1.0, m.to_vec(), 1e-6, model).unwrap();
        // near-resonant outer orbits are rejected by construction
        if let Ok(cfg) = FiveBodyConfig::new(mc, 1.0, a4, 0.1) {
            prop_assert!(callisto_kappa(&cfg).unwrap() > 0.0);
            prop_assert!(callisto_normal_frequency(&cfg).unwrap() > 0.0);
        }
    }
}
