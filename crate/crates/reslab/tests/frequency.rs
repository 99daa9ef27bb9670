use num_complex::Complex64;
use proptest::prelude::*;
use reslab::frequency::*;

fn tones(parts: &[(f64, Complex64)], n: usize, dt: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            parts.iter().map(|(w, a)| a * Complex64::from_polar(1.0, w * t)).sum()
        })
        .collect()
}

#[test]
fn single_tone_to_high_precision() {
    let spec = naff_frequencies(&tones(&[(0.3, Complex64::new(1.0, 0.0))], 8192, 0.7), 0.7, 1).unwrap();
    assert!((spec.lines[0].frequency - 0.3).abs() < 1e-9);
}

#[test]
fn weak_second_tone_is_recovered() {
    let parts = [(0.31, Complex64::new(1.0, 0.0)), (0.77, Complex64::from_polar(1e-3, 0.4))];
    let spec = naff_frequencies(&tones(&parts, 8192, 0.5), 0.5, 2).unwrap();
    let (a, b) = (&spec.lines[0], &spec.lines[1]);
    assert!((a.frequency - 0.31).abs() < 1e-8);
    assert!((b.frequency - 0.77).abs() < 1e-6);
    let ratio = b.amplitude.norm() / a.amplitude.norm();
    assert!((ratio / 1e-3 - 1.0).abs() < 0.01, "amplitude ratio {ratio}");
}

#[test]
fn kepler_signal_gives_mean_motion() {
    let (a, e, m): (f64, f64, f64) = (1.7, 0.1, 1.0);
    let n = (m / a.powi(3)).sqrt();
    let dt = 0.3;
    let signal: Vec<Complex64> = (0..4096)
        .map(|k| {
            let l = n * k as f64 * dt;
            let big_e = reslab::kepler::solve_kepler(l, e).unwrap();
            Complex64::new(a * (big_e.cos() - e), a * (1.0 - e * e).sqrt() * big_e.sin())
        })
        .collect();
    let spec = naff_frequencies(&signal, dt, 1).unwrap();
    assert!((spec.lines[0].frequency - n).abs() < 1e-8 * n);
}

#[test]
fn golden_pair_is_diophantine() {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let dp = DiophantineParams { gamma: 1e-3, tau: 1.5, kmax: 30 };
    let r = diophantine_check(&[1.0, golden], &[], &dp).unwrap();
    assert!(r.pass && r.margin > 0.0);
}

#[test]
fn commensurate_pair_fails() {
    let dp = DiophantineParams { gamma: 1e-6, tau: 1.5, kmax: 5 };
    let r = diophantine_check(&[1.0, 2.0], &[], &dp).unwrap();
    assert!(!r.pass);
    assert_eq!(r.margin, 0.0);
}

#[test]
fn too_short_signal_is_rejected() {
    assert!(naff_frequencies(&tones(&[(0.3, Complex64::new(1.0, 0.0))], 16, 0.7), 0.7, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn recovers_any_resolved_tone(w in 0.05f64..1.5, phase in -3.0f64..3.0, amp in 0.1f64..10.0) {
        let signal = tones(&[(w, Complex64::from_polar(amp, phase))], 4096, 0.5);
        let spec = naff_frequencies(&signal, 0.5, 1).unwrap();
        prop_assert!((spec.lines[0].frequency - w).abs() < 1e-8);
        prop_assert!((spec.lines[0].amplitude.norm() / amp - 1.0).abs() < 1e-6);
    }

    #[test]
    fn margin_scales_with_frequencies(s in 0.1f64..10.0) {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let dp = DiophantineParams { gamma: 1e-12, tau: 1.5, kmax: 12 };
        let a = diophantine_check(&[1.0, golden], &[], &dp).unwrap();
        let b = diophantine_check(&[s, s * golden], &[], &dp).unwrap();
        prop_assert!((b.margin / a.margin / s - 1.0).abs() < 1e-9);
    }
}
