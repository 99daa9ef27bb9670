use proptest::prelude::*;
use reslab::laplace::*;
use reslab::ModelKind;

/// Trapezoid values at 1e-12, frozen from the defining integral.
const B32_1_RESONANT: f64 = 4.922561380515802;

#[test]
fn resonant_fixture_from_quadrature() {
    let alpha = resonant_alpha();
    let oracle = laplace_b_quadrature(1.5, 1, alpha, 1 << 12);
    assert!((oracle - B32_1_RESONANT).abs() < 1e-12, "quadrature {oracle:.16}");
    assert!((laplace_b(1.5, 1, alpha).unwrap() - B32_1_RESONANT).abs() < 1e-10);
}

#[test]
fn resonant_coefficients() {
    let alpha = resonant_alpha();
    assert!((2.0 * coeff_a(alpha).unwrap() - 2.3810).abs() < 5e-4);
    let fixed = coeff_b(alpha, ModelKind::FixedCenter).unwrap();
    let full = coeff_b(alpha, ModelKind::FullProblem).unwrap();
    assert!((2.0 * fixed - 3.3764).abs() < 5e-4);
    assert!((2.0 * full - 0.8566).abs() < 5e-4);
    assert!((fixed - full - 2f64.cbrt()).abs() < 1e-12);
    let c = ResonantCoeffs::resonant(ModelKind::FullProblem);
    assert!(c.a_bar > 0.0 && c.b_bar > 0.0);
}

#[test]
fn b1_fixture() {
    let oracle = 0.25 * laplace_b_quadrature(1.5, 1, 0.5, 1 << 12);
    assert!((coeff_b1(1.0, 2.0).unwrap() - oracle).abs() < 1e-12);
}

#[test]
fn b32_1_increases_with_alpha() {
    let grid: Vec<f64> = (0..=90).map(|k| laplace_b(1.5, 1, 0.01 * f64::from(k)).unwrap()).collect();
    assert!(grid.windows(2).all(|w| w[1] > w[0]));
}

proptest! {
    #[test]
    fn series_matches_quadrature(k in 0i32..6, alpha in 0.0f64..0.95, half in any::<bool>()) {
        let s = if half { 0.5 } else { 1.5 };
        let series = laplace_b(s, k, alpha).unwrap();
        let oracle = laplace_b_quadrature(s, k, alpha, 1 << 14);
        prop_assert!((series - oracle).abs() < 1e-10, "s={s} k={k} alpha={alpha}: {series} vs {oracle}");
    }

    #[test]
    fn negative_order_is_symmetric(k in 1i32..6, alpha in 0.0f64..0.9) {
        prop_assert_eq!(laplace_b(1.5, -k, alpha).unwrap(), laplace_b(1.5, k, alpha).unwrap());
    }

    #[test]
    fn b1_is_homogeneous(a in 0.1f64..0.9, scale in 0.2f64..5.0) {
        let base = coeff_b1(a, 1.0).unwrap();
        let scaled = coeff_b1(scale * a, scale).unwrap();
        prop_assert!((scaled * scale - base).abs() < 1e-12 * base.abs().max(1.0));
    }

    #[test]
    fn coefficients_positive_below_resonance(alpha in 0.3f64..0.7) {
        prop_assert!(coeff_a(alpha).unwrap() > 0.0);
        prop_assert!(coeff_b(alpha, ModelKind::FixedCenter).unwrap() > 0.0);
        let shift = coeff_b(alpha, ModelKind::FixedCenter).unwrap() - coeff_b(alpha, ModelKind::FullProblem).unwrap();
        prop_assert!((shift - alpha.powf(-0.5)).abs() < 1e-12);
    }
}
