//! Random states and Jacobian checks shared by the property suites and the
//! acceptance harness.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use reslab::charts::{delaunay_from_elements, delaunay_partials, CallistoState, CartState, DelaunayState, ResonanceState};
use reslab::elements::{KeplerNorm, OrbitalElements};
use reslab::{MassConfig, ModelKind};

/// Eccentricities stay clear of the circular singularity of the Delaunay chart.
pub const E_RANGE: (f64, f64) = (0.1, 0.5);

pub fn random_mass<R: Rng>(rng: &mut R, n: usize) -> MassConfig {
    let model = if rng.gen_bool(0.5) { ModelKind::FixedCenter } else { ModelKind::FullProblem };
    let mbar = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
    let mu = 10f64.powf(rng.gen_range(-8.0..-3.0));
    MassConfig::new(1.0, mbar, mu, model).unwrap()
}

pub fn random_elements<R: Rng>(rng: &mut R, n: usize) -> Vec<OrbitalElements> {
    let pi = std::f64::consts::PI;
    (0..n)
        .map(|i| {
            let a = 2f64.powi(i as i32) * rng.gen_range(0.6..1.6);
            let e = rng.gen_range(E_RANGE.0..E_RANGE.1);
            OrbitalElements::new(a, e, rng.gen_range(-pi..pi), rng.gen_range(-pi..pi)).unwrap()
        })
        .collect()
}

pub fn random_resonance<R: Rng>(rng: &mut R, mc: &MassConfig) -> ResonanceState {
    let ds = delaunay_from_elements(&random_elements(rng, 3), mc);
    ResonanceState::from_delaunay(&ds).unwrap()
}

pub fn random_callisto<R: Rng>(rng: &mut R, mc: &MassConfig) -> CallistoState {
    let ds = delaunay_from_elements(&random_elements(rng, 4), mc);
    CallistoState::from_delaunay(&ds).unwrap()
}

/// Fourth-order central differences, one column per coordinate.
pub fn jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: &[f64]) -> DMatrix<f64> {
    let m = f(x).len();
    let mut jac = DMatrix::zeros(m, x.len());
    for k in 0..x.len() {
        let at = |s: f64| {
            let mut y = x.to_vec();
            y[k] += s * h[k];
            f(&y)
        };
        let (p1, m1, p2, m2) = (at(1.0), at(-1.0), at(2.0), at(-2.0));
        for r in 0..m {
            jac[(r, k)] = (8.0 * (p1[r] - m1[r]) - (p2[r] - m2[r])) / (12.0 * h[k]);
        }
    }
    jac
}

/// `[[0, I], [-I, 0]]` with positions first.
pub fn standard_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// `max |M^T J M - scale J|`.
pub fn symplectic_defect(m: &DMatrix<f64>, scale: f64) -> f64 {
    let n = m.ncols() / 2;
    let j = standard_form(n);
    (m.transpose() * &j * m - scale * &j).abs().max()
}

/// `d(q; pbar) / d(L, l, G, g)` of every body, composed with `d(L, l, G, g) / dx`.
fn cartesian_jacobian(ds: &DelaunayState, mc: &MassConfig, del_dx: &DMatrix<f64>) -> DMatrix<f64> {
    let n = ds.bodies.len();
    let mut d = DMatrix::zeros(4 * n, 4 * n);
    for (i, b) in ds.bodies.iter().enumerate() {
        let part = delaunay_partials(b, KeplerNorm::of(mc, i)).unwrap();
        let rows = [2 * i, 2 * i + 1, 2 * n + 2 * i, 2 * n + 2 * i + 1];
        for (r, &row) in rows.iter().enumerate() {
            for c in 0..4 {
                d[(row, 4 * i + c)] = part[r][c];
            }
        }
    }
    d * del_dx
}

/// `d(L_i, l_i, G_i, g_i) / d(delta, eta; D, Z)` for the inner triple, in a
/// matrix with the `Z` columns starting at `z0`.
fn inner_block(m: &mut DMatrix<f64>, z0: usize) {
    const DL_DD: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [-2.0, 1.0, 0.0], [0.0, -2.0, 1.0]];
    const DL_DDELTA: [[f64; 3]; 3] = [[1.0, 2.0, 4.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]];
    const DG_DZ: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [-1.0, 1.0, 0.0], [0.0, -1.0, 1.0]];
    const DG_DETA: [[f64; 3]; 3] = [[1.0, 1.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]];
    let d0 = z0 - 3;
    for i in 0..3 {
        for k in 0..3 {
            m[(4 * i, d0 + k)] = DL_DD[i][k];
            m[(4 * i + 1, k)] = DL_DDELTA[i][k];
            m[(4 * i + 2, z0 + k)] = DG_DZ[i][k];
            m[(4 * i + 3, 3 + k)] = DG_DETA[i][k];
        }
    }
}

/// Symplecticity of `(delta, eta; D, Z) -> (q; pbar)`.
pub fn resonance_chart_defect(rs: &ResonanceState, mc: &MassConfig) -> f64 {
    let mut del_dx = DMatrix::zeros(12, 12);
    inner_block(&mut del_dx, 9);
    symplectic_defect(&cartesian_jacobian(&rs.to_delaunay(), mc, &del_dx), 1.0)
}

/// Symplecticity of `(delta, eta, lambda4, eta4; D, Z', Lambda4, xi4) -> (q; pbar)`.
pub fn callisto_chart_defect(cs: &CallistoState, mc: &MassConfig) -> f64 {
    let mut m = DMatrix::zeros(16, 16);
    inner_block(&mut m, 11);
    let (xi, eta) = (cs.xi4, cs.eta4);
    let rho2 = xi * xi + eta * eta;
    // rel = g4 - g3 = -atan2(eta4, xi4); G4 = Lambda4 - rho^2 / 2; G3 = Z3' - Z2 - G4
    let (drel_dxi, drel_deta) = (eta / rho2, -xi / rho2);
    m[(12, 14)] = 1.0;
    m[(13, 6)] = 1.0;
    m[(13, 7)] = -drel_deta;
    m[(13, 15)] = -drel_dxi;
    m[(14, 14)] = 1.0;
    m[(14, 7)] = -eta;
    m[(14, 15)] = -xi;
    m[(15, 5)] = 1.0;
    m[(15, 7)] = drel_deta;
    m[(15, 15)] = drel_dxi;
    m[(10, 14)] = -1.0;
    m[(10, 7)] = eta;
    m[(10, 15)] = xi;
    symplectic_defect(&cartesian_jacobian(&cs.to_delaunay(), mc, &m), 1.0)
}

/// Largest coordinate difference, angles compared modulo `2 pi`.
pub fn angle_aware_diff(a: &[f64], b: &[f64], is_angle: impl Fn(usize) -> bool) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(k, (x, y))| if is_angle(k) { reslab::angles::wrap(x - y).abs() } else { (x - y).abs() })
        .fold(0.0, f64::max)
}

pub fn cart_diff(a: &CartState, b: &CartState) -> f64 {
    angle_aware_diff(&a.to_vec(), &b.to_vec(), |_| false)
}
