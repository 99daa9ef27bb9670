//! Shooting for the relative periodic orbits of the three-satellite problem.
//!
//! The orbits are periodic only up to a rigid rotation. Rather than working
//! in a chart with `(Z3, eta3)` removed, the shooting problem is posed on the
//! Cartesian state with the rotation angle as an extra unknown:
//!
//! ```text
//! R(-theta) phi_T(x) - x = 0,   q3.p3 = 0,   q3_y = 0,   H(x) = h0,   C(x) = c0
//! ```
//!
//! `q3.p3 = 0` is the section `delta3 = 0` (body 3 at pericentre), `q3_y = 0`
//! fixes the rotation gauge (`eta3 = 0`), and `C` is the total angular
//! momentum `Z3`. Every derivative comes from the variational equations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::angles::wrap;
use crate::charts::{cart_from_elements, cart_from_resonance, elements_from_cart, resonance_from_cart, CartState, ResonanceState};
use crate::elements::{cartesian_to_elements, element_partials, KeplerNorm, OrbitalElements};
use crate::error::{Error, Result};
use crate::families::{EquilibriumSolution, FamilyLabel};
use crate::flow::{Composition, System};
use crate::hamiltonian::{kepler_frequencies, semi_major_axis};
use crate::mass::MassConfig;

/// Integration settings for shooting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShootingOptions {
    /// Order of the composed leapfrog.
    pub order: u32,
    /// Steps per period.
    pub steps: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions { order: 8, steps: 1200, max_iter: 20, tol: 1e-10 }
    }
}

#[derive(Clone, Debug)]
pub struct PeriodicOrbitSeed {
    pub label: Option<FamilyLabel>,
    pub mc: MassConfig,
    pub state: CartState,
    pub reduced: ResonanceState,
    pub period: f64,
    pub rotation: f64,
}

impl PeriodicOrbitSeed {
    /// Seed from an equilibrium of the averaged problem: period `2 pi / n3`,
    /// rotation from the common pericentre precession.
    pub fn from_equilibrium(eq: &EquilibriumSolution) -> Result<Self> {
        let n = kepler_frequencies(&eq.state.actions_l(), &eq.mc);
        let period = std::f64::consts::TAU / n[2];
        let nu = crate::hamiltonian::pericentre_frequencies(&eq.state, &eq.mc)?;
        let mut s = Self::from_reduced(&eq.mc, eq.state, period, nu.nu_g[2] * period)?;
        s.label = Some(eq.label);
        Ok(s)
    }

    pub fn from_reduced(mc: &MassConfig, reduced: ResonanceState, period: f64, rotation: f64) -> Result<Self> {
        if mc.n() != 3 {
            return Err(Error::domain("shooting is implemented for three satellites"));
        }
        Ok(PeriodicOrbitSeed {
            label: None,
            mc: mc.clone(),
            state: cart_from_resonance(&reduced, mc)?,
            reduced,
            period,
            rotation,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ContinuedOrbit {
    pub label: Option<FamilyLabel>,
    pub mc: MassConfig,
    pub state: CartState,
    pub reduced: ResonanceState,
    pub period: f64,
    pub rotation: f64,
    pub residual: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    /// `R(-theta) dphi_T`, `12 x 12`.
    pub full_monodromy: DMatrix<f64>,
    /// Return map restricted to the section and the energy/momentum level, `8 x 8`.
    pub monodromy: DMatrix<f64>,
    pub multipliers: Vec<Complex64>,
}

impl ContinuedOrbit {
    /// Largest `| |lambda| - 1 |` over the section multipliers.
    pub fn max_circle_deviation(&self) -> f64 {
        self.multipliers.iter().fold(0.0, |m, l| m.max((l.norm() - 1.0).abs()))
    }

    pub fn determinant(&self) -> f64 {
        self.monodromy.determinant()
    }
}

/// Integrates `t` with `steps` equal steps, optionally with the tangent map.
pub fn propagate(sys: &System, s: &CartState, t: f64, steps: usize, scheme: &Composition, tangent: bool) -> (CartState, Option<DMatrix<f64>>) {
    let mut x = s.clone();
    let dim = 4 * sys.n;
    let mut phi = tangent.then(|| DMatrix::identity(dim, dim));
    let dt = t / steps as f64;
    for _ in 0..steps {
        sys.composition_step(&mut x, dt, scheme, phi.as_mut());
    }
    (x, phi)
}

fn mean_anomaly(s: &CartState, mc: &MassConfig, body: usize) -> Result<f64> {
    let c = cartesian_to_elements(s.q[body], s.p[body], mc, body)?;
    Ok(c.elements.l)
}

/// Flows to the next crossing of `l3 = section` (outermost body's mean
/// anomaly) after leaving the start state, returning the state and time.
pub fn poincare_return_map(state: &CartState, mc: &MassConfig, section: f64, opts: &ShootingOptions) -> Result<(CartState, f64)> {
    let sys = System::new(mc);
    let scheme = Composition::new(opts.order)?;
    let body = mc.n() - 1;
    let el = cartesian_to_elements(state.q[body], state.p[body], mc, body)?.elements;
    let n3 = (mc.kepler_m(body) / el.a.powi(3)).sqrt();
    let t0 = std::f64::consts::TAU / n3;
    let dt = t0 / opts.steps as f64;
    let start = mean_anomaly(state, mc, body)?;
    // unwrapped advance of l3 relative to the section, starting below one turn
    let mut phase = wrap(start - section);
    if phase >= 0.0 {
        phase -= std::f64::consts::TAU;
    }
    let target = 0.0;
    let mut x = state.clone();
    let mut t = 0.0;
    let mut last = start;
    while t < 3.0 * t0 {
        let mut y = x.clone();
        sys.composition_step(&mut y, dt, &scheme, None);
        let l = mean_anomaly(&y, mc, body)?;
        let next_phase = phase + wrap(l - last);
        if next_phase >= target && phase < target {
            // secant refinement of the partial step
            let f = |tau: f64| -> Result<f64> {
                let mut z = x.clone();
                sys.composition_step(&mut z, tau, &scheme, None);
                Ok(phase + wrap(mean_anomaly(&z, mc, body)? - last) - target)
            };
            let (mut a, mut fa) = (0.0, phase - target);
            let (mut b, mut fb) = (dt, next_phase - target);
            for _ in 0..60 {
                let c = b - fb * (b - a) / (fb - fa);
                let fc = f(c)?;
                a = b;
                fa = fb;
                b = c;
                fb = fc;
                if (b - a).abs() < 1e-14 * t0 || fb == 0.0 {
                    break;
                }
            }
            let mut z = x.clone();
            sys.composition_step(&mut z, b, &scheme, None);
            return Ok((z, t + b));
        }
        phase = next_phase;
        last = l;
        x = y;
        t += dt;
    }
    Err(Error::NoReturn(3.0 * t0))
}

fn rot2(v: [f64; 2], a: f64) -> [f64; 2] {
    let (s, c) = a.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

/// Rotation generator applied to a flattened state.
fn generator(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for k in (0..v.len()).step_by(2) {
        out[k] = -v[k + 1];
        out[k + 1] = v[k];
    }
    out
}

fn rotate_flat(v: &[f64], a: f64) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for k in (0..v.len()).step_by(2) {
        let r = rot2([v[k], v[k + 1]], a);
        out[k] = r[0];
        out[k + 1] = r[1];
    }
    out
}

/// Gradients of the four scalar conditions: section, gauge, energy, momentum.
fn constraint_rows(sys: &System, x: &[f64]) -> [Vec<f64>; 4] {
    let n = sys.n;
    let dim = 4 * n;
    let b = n - 1;
    let (qi, pi) = (2 * b, 2 * n + 2 * b);
    let mut sec = vec![0.0; dim];
    sec[qi] = x[pi];
    sec[qi + 1] = x[pi + 1];
    sec[pi] = x[qi];
    sec[pi + 1] = x[qi + 1];
    let mut gauge = vec![0.0; dim];
    gauge[qi + 1] = 1.0;
    let energy = sys.gradient(&CartState::from_slice(x));
    let mut mom = vec![0.0; dim];
    for i in 0..n {
        let (q, p) = (2 * i, 2 * n + 2 * i);
        mom[q] = x[p + 1];
        mom[q + 1] = -x[p];
        mom[p] = -x[q + 1];
        mom[p + 1] = x[q];
    }
    [sec, gauge, energy, mom]
}

/// Shooting chart `(D1,D2,D3, delta1..3, e1..3, eta1..3)`.
///
/// Eccentricities replace `Z` because `L - G` loses digits at small `e`.
pub fn chart_from_cart(cs: &CartState, mc: &MassConfig) -> Result<[f64; 12]> {
    let (els, _) = elements_from_cart(cs, mc)?;
    let big_l: Vec<f64> = (0..3).map(|i| {
        let kn = KeplerNorm::of(mc, i);
        kn.mu_i * (kn.m * els[i].a).sqrt()
    }).collect();
    Ok([
        big_l[0],
        2.0 * big_l[0] + big_l[1],
        4.0 * big_l[0] + 2.0 * big_l[1] + big_l[2],
        wrap(els[0].l - 2.0 * els[1].l),
        wrap(els[1].l - 2.0 * els[2].l),
        wrap(els[2].l),
        els[0].e,
        els[1].e,
        els[2].e,
        wrap(els[0].g - els[1].g),
        wrap(els[1].g - els[2].g),
        wrap(els[2].g),
    ])
}

pub fn cart_from_chart(y: &[f64; 12], mc: &MassConfig) -> Result<CartState> {
    let big_l = [y[0], y[1] - 2.0 * y[0], y[2] - 2.0 * y[1]];
    let l3 = y[5];
    let l2 = y[4] + 2.0 * l3;
    let l1 = y[3] + 2.0 * l2;
    let g3 = y[11];
    let g2 = y[10] + g3;
    let g1 = y[9] + g2;
    let (l, g) = ([l1, l2, l3], [g1, g2, g3]);
    let els = (0..3)
        .map(|i| OrbitalElements::new(semi_major_axis(big_l[i], mc, i), y[6 + i], wrap(l[i]), wrap(g[i])))
        .collect::<Result<Vec<_>>>()?;
    cart_from_elements(&els, mc)
}

const ANGLES: [usize; 6] = [3, 4, 5, 9, 10, 11];

fn chart_diff(a: &[f64; 12], b: &[f64; 12]) -> [f64; 12] {
    let mut d = [0.0; 12];
    for k in 0..12 {
        d[k] = if ANGLES.contains(&k) { wrap(a[k] - b[k]) } else { a[k] - b[k] };
    }
    d
}

/// Fourth-order central differences of a map on 12 coordinates.
#[cfg(test)]
fn fd_jacobian<F, G>(f: F, x: &[f64], h: &[f64], diff: G) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
    G: Fn(&[f64], &[f64]) -> Vec<f64>,
{
    let base = f(x)?;
    let mut jac = DMatrix::zeros(base.len(), x.len());
    for k in 0..x.len() {
        let at = |s: f64| -> Result<Vec<f64>> {
            let mut xx = x.to_vec();
            xx[k] += s * h[k];
            Ok(diff(&f(&xx)?, &base))
        };
        let (p1, m1, p2, m2) = (at(1.0)?, at(-1.0)?, at(2.0)?, at(-2.0)?);
        for r in 0..base.len() {
            jac[(r, k)] = (8.0 * (p1[r] - m1[r]) - (p2[r] - m2[r])) / (12.0 * h[k]);
        }
    }
    Ok(jac)
}

/// Analytic Jacobian of the chart-to-Cartesian map.
fn dcart_dchart(y: &[f64; 12], mc: &MassConfig) -> Result<DMatrix<f64>> {
    const DL_DD: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [-2.0, 1.0, 0.0], [0.0, -2.0, 1.0]];
    const DL_DDELTA: [[f64; 3]; 3] = [[1.0, 2.0, 4.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]];
    const DG_DETA: [[f64; 3]; 3] = [[1.0, 1.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]];
    let big_l = [y[0], y[1] - 2.0 * y[0], y[2] - 2.0 * y[1]];
    let l3 = y[5];
    let l2 = y[4] + 2.0 * l3;
    let l1 = y[3] + 2.0 * l2;
    let g3 = y[11];
    let g2 = y[10] + g3;
    let g1 = y[9] + g2;
    let (l, g) = ([l1, l2, l3], [g1, g2, g3]);
    let mut jac = DMatrix::zeros(12, 12);
    for i in 0..3 {
        let kn = KeplerNorm::of(mc, i);
        let a = semi_major_axis(big_l[i], mc, i);
        let part = element_partials(a, y[6 + i], wrap(l[i]), wrap(g[i]), kn)?;
        let da_dl = 2.0 * a / big_l[i];
        let rows = [2 * i, 2 * i + 1, 6 + 2 * i, 7 + 2 * i];
        for (r, &row) in rows.iter().enumerate() {
            for k in 0..3 {
                jac[(row, k)] += part[r][0] * da_dl * DL_DD[i][k];
                jac[(row, 3 + k)] += part[r][2] * DL_DDELTA[i][k];
                jac[(row, 9 + k)] += part[r][3] * DG_DETA[i][k];
            }
            jac[(row, 6 + i)] += part[r][1];
        }
    }
    Ok(jac)
}

/// Inverse of the chart Jacobian at the chart image of `x`.
fn dchart_dcart(x: &[f64], mc: &MassConfig) -> Result<DMatrix<f64>> {
    let y = chart_from_cart(&CartState::from_slice(x), mc)?;
    dcart_dchart(&y, mc)?
        .try_inverse()
        .ok_or_else(|| Error::Degeneracy("singular chart Jacobian".into()))
}

/// Free chart coordinates: D1, D2, delta1, delta2, e1, e3, eta1, eta2.
const FREE: [usize; 8] = [0, 1, 3, 4, 6, 8, 9, 10];
/// Residual rows: actions, eccentricities, relative angles, then delta3.
const ROWS: [usize; 11] = [0, 1, 2, 6, 7, 8, 3, 4, 9, 10, 5];

struct Shot {
    f: DVector<f64>,
    jac: Option<DMatrix<f64>>,
    x: Vec<f64>,
    end: CartState,
    phi: Option<DMatrix<f64>>,
}

fn shoot(sys: &System, y: &[f64; 12], period: f64, opts: &ShootingOptions, scheme: &Composition, with_jac: bool) -> Result<Shot> {
    let mc = &sys.mc;
    let s = cart_from_chart(y, mc)?;
    let (end, phi) = propagate(sys, &s, period, opts.steps, scheme, with_jac);
    let ye = chart_from_cart(&end, mc)?;
    let d = chart_diff(&ye, y);
    let mut f = DVector::zeros(ROWS.len());
    for (r, &k) in ROWS.iter().enumerate() {
        f[r] = if k == 5 { wrap(ye[5]) } else { d[k] };
    }
    let jac = if with_jac {
        let phi = phi.as_ref().expect("tangent requested");
        let a = dchart_dcart(&end.to_vec(), mc)?;
        let b = dcart_dchart(y, mc)?;
        let full = &a * phi * b;
        let vf = &a * DVector::from_vec(sys.vector_field(&end));
        let mut j = DMatrix::zeros(ROWS.len(), FREE.len() + 1);
        for (r, &k) in ROWS.iter().enumerate() {
            for (c, &m) in FREE.iter().enumerate() {
                j[(r, c)] = full[(k, m)] - if k == m { 1.0 } else { 0.0 };
            }
            j[(r, FREE.len())] = vf[k];
        }
        Some(j)
    } else {
        None
    };
    Ok(Shot { f, jac, x: s.to_vec(), end, phi })
}

fn norm_inf(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Gauss-Newton shooting with backtracking on the 2-norm.
///
/// Unknowns are the free chart coordinates and the period; `D3`, `e2` and
/// the section/gauge angles `delta3 = eta3 = 0` stay at their seed values.
pub fn newton_continue(seed: &PeriodicOrbitSeed, opts: &ShootingOptions) -> Result<ContinuedOrbit> {
    let sys = System::new(&seed.mc);
    let scheme = Composition::new(opts.order)?;
    let mut y = chart_from_cart(&seed.state, &seed.mc)?;
    y[5] = 0.0;
    y[11] = 0.0;
    let mut period = seed.period;
    let mut shot = shoot(&sys, &y, period, opts, &scheme, true)?;
    let mut res = norm_inf(&shot.f);
    let mut merit = shot.f.norm();
    let mut history = vec![res];
    let mut iterations = 0;
    // Once below tolerance, take up to two polishing steps towards the noise floor.
    let mut polish = 0;
    loop {
        if res < opts.tol {
            if polish == 2 {
                break;
            }
            polish += 1;
        } else if iterations >= opts.max_iter {
            return Err(Error::convergence("periodic-orbit shooting", res));
        }
        let jac = shot.jac.clone().expect("jacobian");
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-16 * smax) {
            // a degenerate Kepler-like flow needs no polishing
            if res < opts.tol {
                break;
            }
            return Err(Error::Degeneracy(format!(
                "shooting Jacobian singular: sigma_min/sigma_max = {:.3e}",
                smin / smax
            )));
        }
        let step = svd.solve(&(-&shot.f), 0.0).map_err(|e| Error::Degeneracy(e.to_string()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let mut yn = y;
            for (c, &m) in FREE.iter().enumerate() {
                yn[m] += lambda * step[c];
            }
            let pn = period + lambda * step[FREE.len()];
            if let Ok(cand) = shoot(&sys, &yn, pn, opts, &scheme, false) {
                let mn = cand.f.norm();
                if mn < merit {
                    y = yn;
                    period = pn;
                    merit = mn;
                    res = norm_inf(&cand.f);
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if res < opts.tol {
                break;
            }
            return Err(Error::convergence("periodic-orbit shooting (line search stalled)", res));
        }
        iterations += 1;
        history.push(res);
        shot = shoot(&sys, &y, period, opts, &scheme, true)?;
    }
    if shot.phi.is_none() {
        shot = shoot(&sys, &y, period, opts, &scheme, true)?;
    }
    let x = shot.x.clone();
    let theta = wrap(chart_from_cart(&shot.end, &seed.mc)?[11]);
    let phi = shot.phi.expect("tangent");
    let dim = phi.nrows();
    let mut rphi = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let col: Vec<f64> = (0..dim).map(|r| phi[(r, c)]).collect();
        rphi.set_column(c, &DVector::from_vec(rotate_flat(&col, -theta)));
    }
    let state = CartState::from_slice(&x);
    let monodromy = section_monodromy(&sys, &x, &rphi);
    let multipliers = eigenvalues(&monodromy)?;
    Ok(ContinuedOrbit {
        label: seed.label,
        reduced: resonance_from_cart(&state, &seed.mc)?,
        mc: seed.mc.clone(),
        state,
        period,
        rotation: theta,
        residual: res,
        iterations,
        residual_history: history,
        full_monodromy: rphi,
        monodromy,
        multipliers,
    })
}

/// Restriction of `M = R(-theta) dphi_T` to the 8-dimensional space cut out
/// by the section, gauge, energy and momentum conditions, with the image
/// projected back along the flow and the rotation.
fn section_monodromy(sys: &System, x: &[f64], m: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = 4 * sys.n;
    let rows = constraint_rows(sys, x);
    let c = DMatrix::from_fn(4, dim, |r, k| rows[r][k]);
    // orthonormal basis of ker C
    let qr = c.transpose().qr();
    let q = qr.q();
    let b = {
        // Gram-Schmidt completes the basis
        let mut out: Vec<DVector<f64>> = (0..4).map(|k| q.column(k).into_owned()).collect();
        for k in 0..dim {
            let mut v = DVector::from_fn(dim, |r, _| if r == k { 1.0 } else { 0.0 });
            for _ in 0..2 {
                for u in &out {
                    let d = u.dot(&v);
                    v -= u * d;
                }
            }
            if v.norm() > 1e-8 {
                out.push(v.normalize());
            }
            if out.len() == dim {
                break;
            }
        }
        DMatrix::from_columns(&out[4..])
    };
    let f = DVector::from_vec(sys.vector_field(&CartState::from_slice(x)));
    let r = DVector::from_vec(generator(x));
    let gs = DVector::from_vec(rows[0].clone());
    let gg = DVector::from_vec(rows[1].clone());
    let a2 = nalgebra::Matrix2::new(gs.dot(&f), gs.dot(&r), gg.dot(&f), gg.dot(&r));
    let a2inv = a2.try_inverse().unwrap_or_else(nalgebra::Matrix2::zeros);
    let mut w = m * &b;
    for k in 0..w.ncols() {
        let col = w.column(k).into_owned();
        let coef = a2inv * nalgebra::Vector2::new(gs.dot(&col), gg.dot(&col));
        let proj = &col - &f * coef[0] - &r * coef[1];
        w.set_column(k, &proj);
    }
    b.transpose() * w
}

/// Bounded Schur iteration: near-unipotent matrices can stall the default one.
fn schur_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let schur = m
        .clone()
        .try_schur(f64::EPSILON * m.norm().max(1.0), 100 * m.nrows())
        .ok_or_else(|| Error::convergence("monodromy eigenvalues", f64::NAN))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let mut ev = schur_eigenvalues(m)?;
    ev.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap().then(a.norm().partial_cmp(&b.norm()).unwrap()));
    Ok(ev)
}

/// Multipliers of an orbit, sorted by argument.
pub fn monodromy(orbit: &ContinuedOrbit) -> Vec<Complex64> {
    orbit.multipliers.clone()
}

/// Largest distance from any multiplier's reciprocal to its nearest multiplier.
pub fn reciprocal_defect(mult: &[Complex64]) -> f64 {
    mult.iter()
        .map(|l| {
            let inv = 1.0 / l;
            mult.iter().map(|m| (m - inv).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// How far the flow direction and the rotation generator are from being
/// fixed by the full monodromy (both should be eigenvectors with multiplier 1).
pub fn trivial_defect(orbit: &ContinuedOrbit) -> f64 {
    let sys = System::new(&orbit.mc);
    let x = orbit.state.to_vec();
    let f = DVector::from_vec(sys.vector_field(&orbit.state));
    let r = DVector::from_vec(generator(&x));
    let m = &orbit.full_monodromy;
    ((m * &f - &f).norm() / f.norm()).max((m * &r - &r).norm() / r.norm())
}

/// Eigenvalues of the full `12 x 12` monodromy closest to 1. They form two
/// Jordan blocks, so rounding splits them by roughly the square root of the
/// perturbation; [`trivial_defect`] is the sharper test.
pub fn trivial_multipliers(orbit: &ContinuedOrbit) -> Result<Vec<Complex64>> {
    let mut ev = schur_eigenvalues(&orbit.full_monodromy)?;
    ev.sort_by(|a, b| (a - 1.0).norm().partial_cmp(&(b - 1.0).norm()).unwrap());
    ev.truncate(4);
    Ok(ev)
}

/// Section multipliers `exp(+- i omega T)` predicted from linear frequencies.
pub fn predicted_multipliers(freqs: &[f64], period: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = freqs
        .iter()
        .flat_map(|w| [Complex64::from_polar(1.0, w * period), Complex64::from_polar(1.0, -w * period)])
        .collect();
    out.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
    out
}


/// State displaced from a continued orbit by `dbar` radians in
/// `delta1, delta2, eta1, eta2` and by the relative amount `dbar` in `e1`.
pub fn displaced_state(orbit: &ContinuedOrbit, dbar: f64) -> Result<CartState> {
    let mut y = chart_from_cart(&orbit.state, &orbit.mc)?;
    for k in [3, 4, 9, 10] {
        y[k] += dbar;
    }
    y[6] *= 1.0 + dbar;
    cart_from_chart(&y, &orbit.mc)
}
