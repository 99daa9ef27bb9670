use nalgebra::Complex;
use proptest::prelude::*;
use reslab::families::*;
use reslab::laplace::ResonantCoeffs;
use reslab::{MassConfig, ModelKind};

fn masses(mbar: [f64; 3], model: ModelKind) -> MassConfig {
    MassConfig::new(1.0, mbar.to_vec(), 1e-7, model).unwrap()
}

fn stable(mc: &MassConfig, e2: f64) -> EquilibriumSolution {
    solve_equilibrium(FamilyLabel::stable(), mc, e2, 1.0).unwrap().feasible().expect("stable family feasible")
}

#[test]
fn stable_family_matches_closed_form() {
    // the full problem's reduced masses shift the chain by O(mu)
    for (model, tol) in [(ModelKind::FixedCenter, 1e-10), (ModelKind::FullProblem, 1e-6)] {
        let c = ResonantCoeffs::resonant(model);
        for mbar in [[1.0, 1.0, 1.0], [0.5, 1.5, 0.8], [2.0, 0.3, 1.1]] {
            let eq = stable(&masses(mbar, model), 0.01);
            let cf = stable_closed_form(c.a_bar, c.b_bar, mbar, 0.01);
            for i in 0..3 {
                let rel = (eq.e[i] - cf[i]).abs() / cf[i];
                assert!(rel < tol, "{model:?} {mbar:?}: e{} {} vs {}", i + 1, eq.e[i], cf[i]);
            }
            assert!(eq.residual < 1e-10);
        }
    }
}

#[test]
fn table_has_sixteen_rows_and_one_stable() {
    let mc = masses([1.0, 1.0, 1.0], ModelKind::FixedCenter);
    let rows = family_table(&mc, 0.01, 1.0, mc.mu).unwrap();
    assert_eq!(rows.len(), 16);
    let stable: Vec<_> = rows
        .iter()
        .filter(|r| r.report.as_ref().is_some_and(|s| s.verdict == Verdict::Stable))
        .map(|r| r.label)
        .collect();
    assert_eq!(stable, vec![FamilyLabel::stable()]);
}

#[test]
fn stable_family_is_blocked_when_inner_mass_dominates() {
    let heavy = masses([30.0, 1.0, 0.1], ModelKind::FixedCenter);
    assert!(qbar(&heavy).unwrap() < 0.0);
    let label: FamilyLabel = "---+".parse().unwrap();
    assert!(solve_equilibrium(label, &heavy, 0.01, 1.0).unwrap().feasible().is_none());
}

#[test]
fn kepler_block_is_negative_definite() {
    let eq = stable(&masses([1.0, 1.0, 1.0], ModelKind::FullProblem), 0.01);
    let q = quadratic_coeffs(&eq).unwrap();
    assert!(q.a11 < 0.0 && q.a22 < 0.0);
    assert!(q.a11 * q.a22 - q.a12 * q.a12 > 0.0);
}

#[test]
fn analytic_hessian_matches_differences() {
    let eq = stable(&masses([1.0, 0.6, 1.4], ModelKind::FixedCenter), 0.02);
    let a = res_hessian_analytic(&eq.state, &eq.mc).unwrap();
    let f = res_hessian_fd(&eq.state, &eq.mc).unwrap();
    let scale = a.abs().max();
    assert!((a - f).abs().max() < 1e-5 * scale, "{a}\n{f}");
    assert!((a - a.transpose()).abs().max() <= 1e-14 * scale);
}

#[test]
fn bad_parameters_are_rejected() {
    let mc = masses([1.0, 1.0, 1.0], ModelKind::FixedCenter);
    assert!(solve_equilibrium(FamilyLabel::stable(), &mc, 0.0, 1.0).is_err());
    assert!(solve_equilibrium(FamilyLabel::stable(), &mc, 0.7, 1.0).is_err());
    assert!(solve_equilibrium(FamilyLabel::stable(), &mc, 0.01, -1.0).is_err());
}

fn any_model() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::FixedCenter), Just(ModelKind::FullProblem)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linearization_is_hamiltonian(
        m in prop::array::uniform3(0.3f64..3.0),
        e2 in 0.005f64..0.05,
        model in any_model(),
    ) {
        let mc = masses(m, model);
        for row in family_table(&mc, e2, 1.0, mc.mu).unwrap() {
            let Some(eq) = row.equilibrium else { continue };
            let lin = linearization(&eq, mc.mu).unwrap();
            let scale = lin.matrix.abs().max();
            prop_assert!(lin.matrix.trace().abs() <= 1e-9 * scale);
            // the spectrum is closed under negation
            for l in &lin.eigenvalues {
                let partner = lin.eigenvalues.iter().map(|x| (x + l).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(partner <= 1e-6 * l.norm().max(1e-3 * scale), "{l} has no partner");
            }
        }
    }

    #[test]
    fn quadratic_roots_satisfy_vieta(b in -5.0f64..5.0, c in -5.0f64..5.0) {
        let q = Quadratic { b, c };
        let [r1, r2] = q.roots();
        let sum: Complex<f64> = r1 + r2;
        let prod: Complex<f64> = r1 * r2;
        prop_assert!((sum.re + b).abs() < 1e-12 && sum.im.abs() < 1e-12);
        prop_assert!((prod.re - c).abs() < 1e-11 && prod.im.abs() < 1e-11);
        prop_assert_eq!(q.discriminant() > 0.0 && b > 0.0 && c > 0.0, q.all_good());
    }

    #[test]
    fn feasible_equilibria_balance_frequencies(
        m in prop::array::uniform3(0.3f64..3.0),
        e2 in 0.005f64..0.05,
        model in any_model(),
    ) {
        let mc = masses(m, model);
        let q = qbar(&mc).unwrap();
        let mut feasible = 0;
        for label in enumerate_families() {
            if let Some(eq) = solve_equilibrium(label, &mc, e2, 1.0).unwrap().feasible() {
                feasible += 1;
                prop_assert!(eq.residual < 1e-10);
                prop_assert!(eq.e.iter().all(|e| *e > 0.0 && *e < E_MAX));
                prop_assert_eq!(eq.qbar, q);
            }
        }
        prop_assert!(feasible >= 1);
    }
}

#[test]
fn verdicts_do_not_depend_on_e2() {
    for model in [ModelKind::FixedCenter, ModelKind::FullProblem] {
        for mbar in [[1.0, 1.0, 1.0], [0.3, 1.0, 1.0]] {
            let mc = masses(mbar, model);
            let verdicts: Vec<Vec<Option<Verdict>>> = [0.005, 0.01, 0.02]
                .iter()
                .map(|&e2| {
                    family_table(&mc, e2, 1.0, mc.mu).unwrap().iter().map(|r| r.report.as_ref().map(|s| s.verdict)).collect()
                })
                .collect();
            assert_eq!(verdicts[0], verdicts[1], "{model:?} {mbar:?}");
            assert_eq!(verdicts[1], verdicts[2], "{model:?} {mbar:?}");
        }
    }
}
