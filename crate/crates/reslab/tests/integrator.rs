use reslab::charts::cart_from_elements;
use reslab::elements::OrbitalElements;
use reslab::integrator::*;
use reslab::{MassConfig, ModelKind};

fn galilean_state(mc: &MassConfig) -> reslab::charts::CartState {
    let els: Vec<_> = [(4f64.powf(-2.0 / 3.0), 0.004, 0.3, 0.0), (4f64.powf(-1.0 / 3.0), 0.01, -1.0, 3.1), (1.0, 0.0008, 2.0, 0.5)]
        .iter()
        .map(|&(a, e, l, g)| OrbitalElements::new(a, e, l, g).unwrap())
        .collect();
    cart_from_elements(&els, mc).unwrap()
}

#[test]
fn two_body_matches_kepler_propagation() {
    for model in [ModelKind::FixedCenter, ModelKind::FullProblem] {
        let mc = MassConfig::new(1.0, vec![1.0], 1e-6, model).unwrap();
        let el = OrbitalElements::new(1.3, 0.2, 0.4, 1.1).unwrap();
        let x0 = cart_from_elements(&[el], &mc).unwrap();
        let n = (mc.kepler_m(0) / el.a.powi(3)).sqrt();
        let period = std::f64::consts::TAU / n;
        let (steps, periods) = (64, 1000);
        let traj = integrate(&x0, &mc, Scheme::WisdomHolman, period / steps as f64, steps * periods, steps).unwrap();
        let t = traj.times.last().copied().unwrap();
        let exact = OrbitalElements { l: el.l + n * t, ..el };
        let want = cart_from_elements(&[exact], &mc).unwrap();
        let got = &traj.final_state;
        let err = (0..2)
            .flat_map(|k| [got.q[0][k] - want.q[0][k], got.p[0][k] - want.p[0][k]])
            .fold(0.0f64, |m, d| m.max(d.abs()));
        // roundoff in the recomputed semi-major axis random-walks (Brouwer's
        // law): about 2e-10 of along-track error at 64 steps per period
        assert!(err < 1e-9, "{model:?}: deviation {err:e} after {periods} periods");
        let back = reslab::elements::cartesian_to_elements(got.q[0], got.p[0], &mc, 0).unwrap().elements;
        assert!((back.a - el.a).abs() < 1e-12 && (back.e - el.e).abs() < 1e-12);
    }
}

#[test]
fn forward_then_backward_returns_home() {
    let mc = MassConfig::galilean(ModelKind::FullProblem);
    let x0 = galilean_state(&mc);
    let dt = reference_period(&x0, &mc).unwrap() / 128.0;
    let fwd = integrate(&x0, &mc, Scheme::WisdomHolman, dt, 128 * 50, 128).unwrap();
    let back = integrate(&fwd.final_state, &mc, Scheme::WisdomHolman, -dt, 128 * 50, 128).unwrap();
    let err = x0.to_vec().iter().zip(back.final_state.to_vec()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err < 1e-9, "time-reversal error {err:e}");
}

#[test]
fn energy_error_is_second_order() {
    let mc = MassConfig::galilean(ModelKind::FixedCenter).with_mu(1e-4);
    let x0 = galilean_state(&mc);
    let period = reference_period(&x0, &mc).unwrap();
    let amp = |steps: usize| {
        let traj = integrate(&x0, &mc, Scheme::WisdomHolman, period / steps as f64, steps * 20, steps / 4).unwrap();
        conservation_report(&traj).max_rel_energy
    };
    let ratio = amp(64) / amp(128);
    assert!((3.0..5.0).contains(&ratio), "halving dt changed the energy error by {ratio}");
}

#[test]
fn angular_momentum_is_exact() {
    let mc = MassConfig::galilean(ModelKind::FullProblem);
    let x0 = galilean_state(&mc);
    let dt = reference_period(&x0, &mc).unwrap() / 200.0;
    let traj = integrate(&x0, &mc, Scheme::WisdomHolman, dt, 200 * 1000, 200).unwrap();
    let rep = conservation_report(&traj);
    assert!(rep.max_rel_momentum < 1e-12, "momentum drift {:e}", rep.max_rel_momentum);
    assert!(rep.max_rel_energy < 1e-8, "energy error {:e}", rep.max_rel_energy);
}

#[test]
fn bad_arguments_are_domain_errors() {
    let mc = MassConfig::galilean(ModelKind::FixedCenter);
    let x0 = galilean_state(&mc);
    assert!(integrate(&x0, &mc, Scheme::WisdomHolman, 0.0, 10, 5).is_err());
    assert!(integrate(&x0, &mc, Scheme::WisdomHolman, 0.1, 10, 3).is_err());
    let other = MassConfig::new(1.0, vec![1.0; 2], 1e-6, ModelKind::FixedCenter).unwrap();
    assert!(integrate(&x0, &other, Scheme::WisdomHolman, 0.1, 10, 5).is_err());
}
