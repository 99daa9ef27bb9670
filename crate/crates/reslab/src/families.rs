//! The sixteen collinear families, their equilibria, Hessians, linearization
//! and the two quadratic stability equations.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Complex, Matrix2, SMatrix};
use serde::{Deserialize, Serialize};

use crate::charts::ResonanceState;
use crate::error::{Error, Result};
use crate::hamiltonian::{eval_f_res, pericentre_frequencies, ResTerms};
use crate::laplace::{coeff_a, coeff_b, resonant_alpha};
use crate::mass::MassConfig;

/// Largest eccentricity an equilibrium may have before it is rejected.
pub const E_MAX: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    /// `+` is the angle `pi`, `-` is `0`.
    pub fn angle(self) -> f64 {
        match self {
            Sign::Minus => 0.0,
            Sign::Plus => PI,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }
}

/// Signs of `(delta1, delta2, eta1, eta2)` at the collinear configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyLabel {
    pub signs: [Sign; 4],
}

impl FamilyLabel {
    pub fn angles(&self) -> [f64; 4] {
        self.signs.map(Sign::angle)
    }

    /// The linearly stable family `D(-,-,+,+)`.
    pub fn stable() -> Self {
        "--++".parse().expect("valid label")
    }

    pub fn compact(&self) -> String {
        self.signs.iter().map(|s| s.symbol()).collect()
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.compact())
    }
}

impl std::str::FromStr for FamilyLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body: Vec<char> = s.trim().trim_start_matches(['D', 'E']).chars().filter(|c| *c != ',').collect();
        if body.len() != 4 {
            return Err(Error::Config(format!("family label `{s}` needs four signs")));
        }
        let mut signs = [Sign::Minus; 4];
        for (k, c) in body.iter().enumerate() {
            signs[k] = match c {
                '+' | 'p' => Sign::Plus,
                '-' | 'm' => Sign::Minus,
                _ => return Err(Error::Config(format!("bad sign `{c}` in family label `{s}`"))),
            };
        }
        Ok(FamilyLabel { signs })
    }
}

/// All sixteen labels, `----` first, `++++` last.
pub fn enumerate_families() -> Vec<FamilyLabel> {
    (0..16u8)
        .map(|bits| {
            let mut signs = [Sign::Minus; 4];
            for (k, s) in signs.iter_mut().enumerate() {
                if bits & (1 << (3 - k)) != 0 {
                    *s = Sign::Plus;
                }
            }
            FamilyLabel { signs }
        })
        .collect()
}

/// `Qbar = 2^{1/3} A mbar3 - 2 B mbar1` with the coefficients of `mc.model`.
pub fn qbar(mc: &MassConfig) -> Result<f64> {
    let alpha = resonant_alpha();
    Ok(2f64.cbrt() * coeff_a(alpha)? * mc.mbar[2] - 2.0 * coeff_b(alpha, mc.model)? * mc.mbar[0])
}

/// Exact 4:2:1 Keplerian circle with outer semi-major axis `a3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonantCircle {
    pub a: [f64; 3],
    pub big_l: [f64; 3],
    pub d: [f64; 3],
}

pub fn resonant_circle(mc: &MassConfig, a3: f64) -> Result<ResonantCircle> {
    if mc.n() < 3 {
        return Err(Error::domain("the resonant circle needs three satellites"));
    }
    if !(a3 > 0.0) {
        return Err(Error::domain("outer semi-major axis must be positive"));
    }
    let n3 = (mc.kepler_m(2) / (a3 * a3 * a3)).sqrt();
    let mut a = [0.0; 3];
    let mut big_l = [0.0; 3];
    for i in 0..3 {
        let n = n3 * f64::from(1u32 << (2 - i));
        a[i] = (mc.kepler_m(i) / (n * n)).cbrt();
        big_l[i] = mc.kepler_mu(i) * (mc.kepler_m(i) * a[i]).sqrt();
    }
    a[2] = a3;
    Ok(ResonantCircle {
        a,
        big_l,
        d: [big_l[0], 2.0 * big_l[0] + big_l[1], 4.0 * big_l[0] + 2.0 * big_l[1] + big_l[2]],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub label: FamilyLabel,
    /// First-order eccentricities `sqrt(2(L-G)/L)`; `e[1]` is the parameter.
    pub e: [f64; 3],
    pub actions: [f64; 3],
    pub mc: MassConfig,
    pub qbar: f64,
    /// The equilibrium in the resonance chart with `delta3 = eta3 = 0`.
    pub state: ResonanceState,
    /// `|nu1| + |nu2|` at the returned state.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Equilibrium {
    Feasible(EquilibriumSolution),
    Infeasible { label: FamilyLabel, reason: String },
}

impl Equilibrium {
    pub fn feasible(self) -> Option<EquilibriumSolution> {
        match self {
            Equilibrium::Feasible(s) => Some(s),
            Equilibrium::Infeasible { .. } => None,
        }
    }
}

/// Resonance-chart state with the label's angles and given eccentricities.
pub fn collinear_state(label: FamilyLabel, circle: &ResonantCircle, e: [f64; 3]) -> ResonanceState {
    let ang = label.angles();
    let g: Vec<f64> = (0..3).map(|i| circle.big_l[i] * (1.0 - 0.5 * e[i] * e[i])).collect();
    ResonanceState {
        d: circle.d,
        delta: [ang[0], ang[1], 0.0],
        z: [g[0], g[0] + g[1], g[0] + g[1] + g[2]],
        eta: [ang[2], ang[3], 0.0],
    }
}

/// Solves `nu1 = nu2 = 0` for `(e1, e3)` at fixed `e2`.
///
/// Each pericentre frequency has the form `K_i / e_i`, so a positive solution
/// exists iff the three `K_i` share a sign; the balance `e_i = e2 K_i / K_2`
/// seeds a Newton polish on the evaluated frequencies.
pub fn solve_equilibrium(label: FamilyLabel, mc: &MassConfig, e2: f64, a3: f64) -> Result<Equilibrium> {
    if !(e2 > 0.0 && e2 < E_MAX) {
        return Err(Error::domain(format!("e2 must lie in (0, {E_MAX}), got {e2}")));
    }
    let circle = resonant_circle(mc, a3)?;
    let probe = collinear_state(label, &circle, [e2; 3]);
    let t = ResTerms::new(&probe, mc)?;
    let c = t.phases.map(f64::cos);
    let k = [
        -t.p12 * t.a12 * c[0] / t.big_l[0],
        (t.p12 * t.b12 * c[1] - t.p23 * t.a23 * c[2]) / t.big_l[1],
        t.p23 * t.b23 * c[3] / t.big_l[2],
    ];
    let q = qbar(mc)?;
    let scale = k.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(Equilibrium::Infeasible { label, reason: "no resonant coupling (mu or masses vanish)".into() });
    }
    let same_sign = k.iter().all(|x| *x > 1e-12 * scale) || k.iter().all(|x| *x < -1e-12 * scale);
    if !same_sign {
        return Ok(Equilibrium::Infeasible {
            label,
            reason: format!("pericentre balance has mixed signs (Qbar = {q:.6})"),
        });
    }
    let mut e = [e2 * k[0] / k[1], e2, e2 * k[2] / k[1]];
    if e[0] >= E_MAX || e[2] >= E_MAX {
        return Ok(Equilibrium::Infeasible { label, reason: format!("eccentricities leave the domain: {e:?}") });
    }
    let residual_at = |e: [f64; 3]| -> Result<[f64; 2]> {
        Ok(pericentre_frequencies(&collinear_state(label, &circle, e), mc)?.nu_rel)
    };
    // nu1 = K1/e1 - nu_g2 and nu2 = nu_g2 - K3/e3: the Jacobian in (e1, e3) is diagonal
    let mut r = residual_at(e)?;
    for _ in 0..20 {
        let cand = [e[0] + r[0] * e[0] * e[0] / k[0], e[1], e[2] - r[1] * e[2] * e[2] / k[2]];
        if !(cand[0] > 0.0 && cand[2] > 0.0) {
            break;
        }
        let rc = residual_at(cand)?;
        if rc[0].abs() + rc[1].abs() >= r[0].abs() + r[1].abs() {
            break;
        }
        e = cand;
        r = rc;
    }
    let residual = r[0].abs() + r[1].abs();
    // at extreme mass ratios the eccentricities shrink and L - G loses digits,
    // so the absolute target is relaxed to a relative one
    let freq_scale = (k[1] / e2).abs();
    if residual > 1e-10 && residual > 1e-5 * freq_scale {
        return Err(Error::convergence("equilibrium Newton", residual));
    }
    Ok(Equilibrium::Feasible(EquilibriumSolution {
        label,
        e,
        actions: circle.d,
        mc: mc.clone(),
        qbar: q,
        state: collinear_state(label, &circle, e),
        residual,
    }))
}

/// Closed form for `D(-,-,+,+)` on the exact chain with `a3 = 1`:
/// `e1 = 2 2^{5/6} A m2 e2 / (2 sqrt2 B m1 + 2^{5/6} A m3)`,
/// `e3 = sqrt2 B m2 e2 / (2 sqrt2 B m1 + 2^{5/6} A m3)`.
///
/// Both follow from equating `nu_g1 = nu_g2 = nu_g3` with `L_i = mbar_i sqrt(a_i)`.
pub fn stable_closed_form(a_bar: f64, b_bar: f64, mbar: [f64; 3], e2: f64) -> [f64; 3] {
    let c56 = 2f64.powf(5.0 / 6.0);
    let den = 2.0 * 2f64.sqrt() * b_bar * mbar[0] + c56 * a_bar * mbar[2];
    [2.0 * c56 * a_bar * mbar[1] * e2 / den, e2, 2f64.sqrt() * b_bar * mbar[1] * e2 / den]
}

/// Coordinates `(delta1, delta2, Z1, Z2, eta1, eta2)` of the reduced system.
pub fn reduced_coords(rs: &ResonanceState) -> [f64; 6] {
    [rs.delta[0], rs.delta[1], rs.z[0], rs.z[1], rs.eta[0], rs.eta[1]]
}

fn with_reduced(base: &ResonanceState, x: &[f64; 6]) -> ResonanceState {
    let mut s = *base;
    s.delta[0] = x[0];
    s.delta[1] = x[1];
    s.z[0] = x[2];
    s.z[1] = x[3];
    s.eta[0] = x[4];
    s.eta[1] = x[5];
    s
}

/// `d^2 F_Kep / d(D1, D2)^2` at fixed `D3`.
pub fn kepler_hessian(rs: &ResonanceState, mc: &MassConfig) -> Matrix2<f64> {
    let l = rs.actions_l();
    let f2: Vec<f64> = (0..3)
        .map(|i| {
            let (m, k) = (mc.kepler_mu(i), mc.kepler_m(i));
            -3.0 * m * m * m * k * k / l[i].powi(4)
        })
        .collect();
    // L1 = D1, L2 = D2 - 2 D1, L3 = D3 - 2 D2
    Matrix2::new(f2[0] + 4.0 * f2[1], -2.0 * f2[1], -2.0 * f2[1], f2[1] + 4.0 * f2[2])
}

/// Largest accepted disagreement between successive Richardson levels,
/// relative to the geometric mean of the matching diagonal entries.
pub const RICHARDSON_TOL: f64 = 1e-5;

/// Central-difference Hessian with two Richardson levels; fails if two
/// successive extrapolations disagree.
fn fd_hessian<const N: usize, F>(f: F, x0: [f64; N], steps: [f64; N]) -> Result<SMatrix<f64, N, N>>
where
    F: Fn(&[f64; N]) -> Result<f64>,
{
    let fd = |scale: f64| -> Result<SMatrix<f64, N, N>> {
        let h: Vec<f64> = steps.iter().map(|s| s * scale).collect();
        let f0 = f(&x0)?;
        let mut m = SMatrix::<f64, N, N>::zeros();
        for i in 0..N {
            let mut xp = x0;
            let mut xm = x0;
            xp[i] += h[i];
            xm[i] -= h[i];
            m[(i, i)] = (f(&xp)? - 2.0 * f0 + f(&xm)?) / (h[i] * h[i]);
            for j in 0..i {
                let mut pp = x0;
                let mut pm = x0;
                let mut mp = x0;
                let mut mm = x0;
                pp[i] += h[i];
                pp[j] += h[j];
                pm[i] += h[i];
                pm[j] -= h[j];
                mp[i] -= h[i];
                mp[j] += h[j];
                mm[i] -= h[i];
                mm[j] -= h[j];
                let v = (f(&pp)? - f(&pm)? - f(&mp)? + f(&mm)?) / (4.0 * h[i] * h[j]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    };
    let (h1, h2, h4) = (fd(1.0)?, fd(0.5)?, fd(0.25)?);
    let r1 = (h2 * 4.0 - h1) / 3.0;
    let r1b = (h4 * 4.0 - h2) / 3.0;
    let r2 = (r1b * 16.0 - r1) / 15.0;
    // compare entrywise against the size of the corresponding diagonal scales
    for i in 0..N {
        for j in 0..N {
            let scale = (r2[(i, i)].abs() * r2[(j, j)].abs()).sqrt().max(r2[(i, j)].abs());
            let diff = (r1b[(i, j)] - r2[(i, j)]).abs();
            if scale > 0.0 && diff > RICHARDSON_TOL * scale {
                return Err(Error::convergence(format!("Richardson Hessian entry ({i},{j})"), diff / scale));
            }
        }
    }
    Ok(r2)
}

fn min_gap(rs: &ResonanceState) -> Result<f64> {
    let l = rs.actions_l();
    let g = rs.actions_g();
    let gap = (0..3).map(|i| l[i] - g[i]).fold(f64::INFINITY, f64::min);
    if !(gap > 0.0) {
        return Err(Error::domain("reduced Hessian needs nonzero eccentricities"));
    }
    Ok(gap)
}

/// Hessian of `F_res` in the reduced coordinates by Richardson-extrapolated
/// central differences.
pub fn res_hessian_fd(rs: &ResonanceState, mc: &MassConfig) -> Result<SMatrix<f64, 6, 6>> {
    let hz = 2e-2 * min_gap(rs)?;
    let ha = 2e-2;
    fd_hessian(|x| eval_f_res(&with_reduced(rs, x), mc), reduced_coords(rs), [ha, ha, hz, hz, ha, ha])
}

/// Hessian of `F_res` over `(D1, D2, d1, d2, Z1, Z2, e1, e2)`, keeping the
/// action couplings that enter through `ehat(L, G)` and the semi-major axes.
pub fn res_hessian_coupled(rs: &ResonanceState, mc: &MassConfig) -> Result<SMatrix<f64, 8, 8>> {
    let hz = 2e-2 * min_gap(rs)?;
    let ha = 2e-2;
    let r = reduced_coords(rs);
    let x0 = [rs.d[0], rs.d[1], r[0], r[1], r[2], r[3], r[4], r[5]];
    fd_hessian(
        |x| {
            let mut s = with_reduced(rs, &[x[2], x[3], x[4], x[5], x[6], x[7]]);
            s.d[0] = x[0];
            s.d[1] = x[1];
            eval_f_res(&s, mc)
        },
        x0,
        [hz, hz, ha, ha, hz, hz, ha, ha],
    )
}

/// Linearization of `F_Kep + F_res` keeping every second derivative,
/// including the action cross terms that the block-diagonal form drops.
/// Those terms are of relative size `mu / e^3`.
pub fn coupled_linearization(eq: &EquilibriumSolution) -> Result<Linearization> {
    let mut hess = res_hessian_coupled(&eq.state, &eq.mc)?;
    let h1 = kepler_hessian(&eq.state, &eq.mc);
    for i in 0..2 {
        for j in 0..2 {
            hess[(i, j)] += h1[(i, j)];
        }
    }
    let matrix = symplectic_j8() * hess;
    let mut eigenvalues: Vec<Complex<f64>> = matrix.complex_eigenvalues().iter().copied().collect();
    sort_spectrum(&mut eigenvalues);
    let mu = eq.mc.mu;
    let k = mu.powf(0.25);
    let s = [k, k, 1.0 / k, 1.0 / k, k, k, 1.0 / k, 1.0 / k];
    let mut rescaled = matrix;
    for i in 0..8 {
        for j in 0..8 {
            rescaled[(i, j)] *= s[j] / s[i] / mu.sqrt();
        }
    }
    Ok(Linearization { matrix, rescaled, eigenvalues })
}

/// Closed-form Hessian of `F_res` in the reduced coordinates.
pub fn res_hessian_analytic(rs: &ResonanceState, mc: &MassConfig) -> Result<SMatrix<f64, 6, 6>> {
    let t = ResTerms::new(rs, mc)?;
    // (weight, body, [coef of delta1, delta2, eta1, eta2], phase)
    let terms = [
        (t.p12 * t.a12, 0usize, [1.0, 0.0, 2.0, 0.0], t.phases[0]),
        (-t.p12 * t.b12, 1, [1.0, 0.0, 1.0, 0.0], t.phases[1]),
        (t.p23 * t.a23, 1, [0.0, 1.0, 0.0, 2.0], t.phases[2]),
        (-t.p23 * t.b23, 2, [0.0, 1.0, 0.0, 1.0], t.phases[3]),
    ];
    // dG_k / d(Z1, Z2): G1 = Z1, G2 = Z2 - Z1, G3 = Z3 - Z2
    let dg = [[1.0, 0.0], [-1.0, 1.0], [0.0, -1.0]];
    let ang_idx = [0usize, 1, 4, 5];
    let z_idx = [2usize, 3];
    let mut h = SMatrix::<f64, 6, 6>::zeros();
    for (w, k, c, phi) in terms {
        let (e, big_l) = (t.ehat[k], t.big_l[k]);
        if e == 0.0 {
            return Err(Error::domain("analytic Hessian is singular at zero eccentricity"));
        }
        let e1 = -1.0 / (big_l * e);
        let e2 = -1.0 / (big_l * big_l * e * e * e);
        let (s, co) = phi.sin_cos();
        for a in 0..4 {
            for b in 0..4 {
                h[(ang_idx[a], ang_idx[b])] -= w * e * co * c[a] * c[b];
            }
            for b in 0..2 {
                let v = -w * e1 * s * c[a] * dg[k][b];
                h[(ang_idx[a], z_idx[b])] += v;
                h[(z_idx[b], ang_idx[a])] += v;
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                h[(z_idx[a], z_idx[b])] += w * e2 * co * dg[k][a] * dg[k][b];
            }
        }
    }
    Ok(h)
}

/// `(H1, H2)`: Kepler Hessian in `(D1, D2)` and reduced `F_res` Hessian.
/// The closed form is used; [`res_hessian_fd`] is kept as its cross-check.
pub fn hessians(eq: &EquilibriumSolution) -> Result<(Matrix2<f64>, SMatrix<f64, 6, 6>)> {
    Ok((kepler_hessian(&eq.state, &eq.mc), res_hessian_analytic(&eq.state, &eq.mc)?))
}

/// Symplectic matrix of the ordering `(D1, D2, d1, d2, Z1, Z2, e1, e2)`.
pub fn symplectic_j8() -> SMatrix<f64, 8, 8> {
    let mut j = SMatrix::<f64, 8, 8>::zeros();
    for (a, b) in [(0usize, 2usize), (1, 3), (4, 6), (5, 7)] {
        j[(a, b)] = -1.0;
        j[(b, a)] = 1.0;
    }
    j
}

#[derive(Clone, Debug, PartialEq)]
pub struct Linearization {
    /// `J diag(H1, H2)` in the original chart.
    pub matrix: SMatrix<f64, 8, 8>,
    /// The same matrix in the rescaled chart, divided by `sqrt(mu)`.
    pub rescaled: SMatrix<f64, 8, 8>,
    /// Eigenvalues of `matrix` (physical rates).
    pub eigenvalues: Vec<Complex<f64>>,
}

pub fn linearization_from(h1: &Matrix2<f64>, h2: &SMatrix<f64, 6, 6>, mu: f64) -> Linearization {
    let mut hess = SMatrix::<f64, 8, 8>::zeros();
    hess.fixed_view_mut::<2, 2>(0, 0).copy_from(h1);
    hess.fixed_view_mut::<6, 6>(2, 2).copy_from(h2);
    let matrix = symplectic_j8() * hess;
    // actions scale with k, angles with 1/k, where k^2 = sqrt(mu)
    let k = mu.powf(0.25);
    let s = [k, k, 1.0 / k, 1.0 / k, k, k, 1.0 / k, 1.0 / k];
    let mut rescaled = matrix;
    for i in 0..8 {
        for j in 0..8 {
            rescaled[(i, j)] *= s[j] / s[i] / mu.sqrt();
        }
    }
    let mut eigenvalues: Vec<Complex<f64>> = matrix.complex_eigenvalues().iter().copied().collect();
    sort_spectrum(&mut eigenvalues);
    Linearization { matrix, rescaled, eigenvalues }
}

/// Linearization at an equilibrium. The Hessians depend on `mu` only through
/// `eq.mc`; the supplied `mu` rescales the chart.
pub fn linearization(eq: &EquilibriumSolution, mu: f64) -> Result<Linearization> {
    let (h1, h2) = hessians(eq)?;
    Ok(linearization_from(&h1, &h2, mu))
}

fn sort_spectrum(v: &mut [Complex<f64>]) {
    v.sort_by(|a, b| {
        (a.norm(), a.im, a.re).partial_cmp(&(b.norm(), b.im, b.re)).unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Monic quadratic `x^2 + b x + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.c
    }

    /// Roots; complex roots returned as `(re, im)` pairs.
    pub fn roots(&self) -> [Complex<f64>; 2] {
        let d = self.discriminant();
        if d >= 0.0 {
            let q = -0.5 * (self.b + self.b.signum() * d.sqrt());
            let r1 = if q != 0.0 { q } else { -0.5 * self.b };
            let r2 = if q != 0.0 { self.c / q } else { -0.5 * self.b };
            [Complex::new(r1.min(r2), 0.0), Complex::new(r1.max(r2), 0.0)]
        } else {
            let im = 0.5 * (-d).sqrt();
            [Complex::new(-0.5 * self.b, -im), Complex::new(-0.5 * self.b, im)]
        }
    }

    /// Distinct, real, negative roots.
    pub fn all_good(&self) -> bool {
        self.discriminant() > 0.0 && self.b > 0.0 && self.c > 0.0
    }

    /// Roots within `1e-8` (relative) of a double root.
    pub fn nearly_double(&self) -> bool {
        let r = self.roots();
        let scale = r[0].norm().max(r[1].norm());
        scale > 0.0 && (r[0] - r[1]).norm() <= 1e-8 * scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadCoeffs {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    pub s: f64,
    pub s_prime: f64,
    pub b11: f64,
    pub b12: f64,
    pub b22: f64,
    pub sigma: f64,
    pub sigma_prime: f64,
}

impl QuadCoeffs {
    pub fn quad1(&self) -> Quadratic {
        Quadratic {
            b: -(self.a11 * self.s + self.a22 * self.s_prime),
            c: (self.a11 * self.a22 - self.a12 * self.a12) * self.s * self.s_prime,
        }
    }

    pub fn quad2(&self) -> Quadratic {
        Quadratic {
            b: -(self.b11 * self.sigma + self.b22 * self.sigma_prime),
            c: (self.b11 * self.b22 - self.b12 * self.b12) * self.sigma * self.sigma_prime,
        }
    }
}

/// The ten scalar coefficients in the rescaled chart.
///
/// `s, s'` are the negated `delta`-curvatures of `F_res`; `sigma, sigma'` are
/// the negated `eta`-curvatures after eliminating the fast `delta`
/// (Schur complement), all divided by `mu`. `B` is the `Z`-block over `mu`.
pub fn quadratic_coeffs_from(h1: &Matrix2<f64>, h2: &SMatrix<f64, 6, 6>, mu: f64) -> Result<QuadCoeffs> {
    let (d1, d2) = (h2[(0, 0)], h2[(1, 1)]);
    let tiny = 1e-300;
    if d1.abs() < tiny || d2.abs() < tiny {
        return Err(Error::SingularDenominator("a delta-curvature of F_res vanishes".into()));
    }
    let schur1 = h2[(4, 4)] - h2[(0, 4)] * h2[(0, 4)] / d1;
    let schur2 = h2[(5, 5)] - h2[(1, 5)] * h2[(1, 5)] / d2;
    Ok(QuadCoeffs {
        a11: h1[(0, 0)],
        a12: h1[(0, 1)],
        a22: h1[(1, 1)],
        s: -d1 / mu,
        s_prime: -d2 / mu,
        b11: h2[(2, 2)] / mu,
        b12: h2[(2, 3)] / mu,
        b22: h2[(3, 3)] / mu,
        sigma: -schur1 / mu,
        sigma_prime: -schur2 / mu,
    })
}

pub fn quadratic_coeffs(eq: &EquilibriumSolution) -> Result<QuadCoeffs> {
    let (h1, h2) = hessians(eq)?;
    quadratic_coeffs_from(&h1, &h2, eq.mc.mu)
}

/// Normal frequencies predicted by the quadratics: fast pair
/// `sqrt(mu |x|)` and slow pair `mu sqrt|x'|`, sorted ascending.
pub fn predicted_frequencies(q: &QuadCoeffs, mu: f64) -> Vec<f64> {
    let mut out: Vec<f64> = q.quad1().roots().iter().map(|r| (mu * r.norm()).sqrt()).collect();
    out.extend(q.quad2().roots().iter().map(|r| mu * r.norm().sqrt()));
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub label: FamilyLabel,
    pub hessian_det: f64,
    pub hessian_det_sign: i8,
    pub quad1: Quadratic,
    pub quad2: Quadratic,
    pub coeffs: QuadCoeffs,
    /// Eigenvalues `(re, im)` of the 8x8 linearization at the supplied `mu`.
    pub spectrum: Vec<(f64, f64)>,
    /// `max |Re l| / |l|` over the spectrum.
    pub max_real_ratio: f64,
    /// Which quadratic rules out stability (1 or 2), if any.
    pub failed_by: Option<u8>,
    pub verdict: Verdict,
}

pub fn classify_stability(eq: &EquilibriumSolution, mu: f64) -> Result<StabilityReport> {
    let (h1, h2) = hessians(eq)?;
    let coeffs = quadratic_coeffs_from(&h1, &h2, eq.mc.mu)?;
    let (q1, q2) = (coeffs.quad1(), coeffs.quad2());
    let lin = linearization_from(&h1, &h2, mu);
    let det = h2.determinant();
    let max_real_ratio = lin
        .eigenvalues
        .iter()
        .map(|l| if l.norm() > 0.0 { l.re.abs() / l.norm() } else { 0.0 })
        .fold(0.0, f64::max);
    let failed_by = if !q1.all_good() {
        Some(1)
    } else if !q2.all_good() {
        Some(2)
    } else {
        None
    };
    let verdict = if q1.nearly_double() || q2.nearly_double() {
        Verdict::Indeterminate
    } else if failed_by.is_none() {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    Ok(StabilityReport {
        label: eq.label,
        hessian_det: det,
        hessian_det_sign: if det > 0.0 { 1 } else if det < 0.0 { -1 } else { 0 },
        quad1: q1,
        quad2: q2,
        coeffs,
        spectrum: lin.eigenvalues.iter().map(|c| (c.re, c.im)).collect(),
        max_real_ratio,
        failed_by,
        verdict,
    })
}

/// One row of the family table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub label: FamilyLabel,
    pub qbar: f64,
    pub equilibrium: Option<EquilibriumSolution>,
    pub report: Option<StabilityReport>,
}

/// Classifies all sixteen families; rows follow [`enumerate_families`].
pub fn family_table(mc: &MassConfig, e2: f64, a3: f64, mu: f64) -> Result<Vec<FamilyRow>> {
    use rayon::prelude::*;
    let q = qbar(mc)?;
    enumerate_families()
        .into_par_iter()
        .map(|label| {
            let eq = solve_equilibrium(label, mc, e2, a3)?.feasible();
            let report = match &eq {
                Some(eq) => Some(classify_stability(eq, mu)?),
                None => None,
            };
            Ok(FamilyRow { label, qbar: q, equilibrium: eq, report })
        })
        .collect()
}

/// Asymptotic spectra comparison: the largest relative deviation between the
/// predicted normal frequencies and the `|Im|` parts of the 8x8 spectrum.
pub fn asymptotic_deviation(eq: &EquilibriumSolution) -> Result<f64> {
    let (h1, h2) = hessians(eq)?;
    let coeffs = quadratic_coeffs_from(&h1, &h2, eq.mc.mu)?;
    let pred = predicted_frequencies(&coeffs, eq.mc.mu);
    let lin = linearization_from(&h1, &h2, eq.mc.mu);
    let measured = normal_frequencies(&lin.eigenvalues);
    Ok(pred.iter().zip(&measured).map(|(p, m)| ((p - m) / m).abs()).fold(0.0, f64::max))
}

/// Positive imaginary parts (one per conjugate pair), sorted ascending.
pub fn normal_frequencies(eigs: &[Complex<f64>]) -> Vec<f64> {
    let mut w: Vec<f64> = eigs.iter().filter(|l| l.im > 0.0).map(|l| l.im).collect();
    w.sort_by(|a, b| a.partial_cmp(b).unwrap());
    w
}

/// Determinants of `d(b1, c1)/d(mbar1, e2)` and `d(b2, c2)/d(mbar2, mbar3)`
/// for `D(-,-,+,+)` by central differences (relative step `1e-4`).
pub fn kam_jacobians(mc: &MassConfig, e2: f64, a3: f64) -> Result<(f64, f64)> {
    let label = FamilyLabel::stable();
    let quads = |mbar: &[f64], e2: f64| -> Result<(Quadratic, Quadratic)> {
        let mut m = mc.clone();
        m.mbar[..3].copy_from_slice(&mbar[..3]);
        let eq = solve_equilibrium(label, &m, e2, a3)?
            .feasible()
            .ok_or_else(|| Error::domain("D(-,-,+,+) infeasible while differentiating"))?;
        // analytic curvature: near mbar2, mbar3 -> 0 the gaps L - G shrink and
        // differencing in Z loses digits to the L - G cancellation
        let h1 = kepler_hessian(&eq.state, &eq.mc);
        let h2 = res_hessian_analytic(&eq.state, &eq.mc)?;
        let q = quadratic_coeffs_from(&h1, &h2, eq.mc.mu)?;
        Ok((q.quad1(), q.quad2()))
    };
    let base: Vec<f64> = mc.mbar[..3].to_vec();
    let rel = 1e-4;
    let diff = |which: usize| -> Result<((f64, f64), (f64, f64))> {
        // which: 0..3 -> mbar index, 3 -> e2
        let (mut mp, mut mm) = (base.clone(), base.clone());
        let (mut ep, mut em) = (e2, e2);
        let h;
        if which < 3 {
            h = rel * base[which];
            mp[which] += h;
            mm[which] -= h;
        } else {
            h = rel * e2;
            ep += h;
            em -= h;
        }
        let (p1, p2) = quads(&mp, ep)?;
        let (m1, m2) = quads(&mm, em)?;
        Ok((
            ((p1.b - m1.b) / (2.0 * h), (p1.c - m1.c) / (2.0 * h)),
            ((p2.b - m2.b) / (2.0 * h), (p2.c - m2.c) / (2.0 * h)),
        ))
    };
    let (d_m1, _) = diff(0)?;
    let (d_e2, _) = diff(3)?;
    let (_, d_m2) = diff(1)?;
    let (_, d_m3) = diff(2)?;
    let det1 = d_m1.0 * d_e2.1 - d_e2.0 * d_m1.1;
    let det2 = d_m2.0 * d_m3.1 - d_m3.0 * d_m2.1;
    Ok((det1, det2))
}

/// Limit of [`kam_jacobians`] as `mbar1 -> 1`, `mbar2, mbar3 -> 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KamLimit {
    /// `(eps, det1, det2)` at `mbar = (1, eps, eps)`.
    pub samples: Vec<(f64, f64, f64)>,
    pub det1_limit: f64,
    pub det2_limit: f64,
    /// `8 B^3 A` and `-16 2^{5/6} B^10` with the model's coefficients.
    pub det1_target: f64,
    pub det2_target: f64,
}

pub fn kam_limit(mc: &MassConfig, e2: f64, a3: f64) -> Result<KamLimit> {
    let eps = [0.08, 0.04, 0.02, 0.01];
    let mut samples = Vec::new();
    for &x in &eps {
        let mut m = mc.clone();
        m.mbar[0] = 1.0;
        m.mbar[1] = x;
        m.mbar[2] = x;
        let (d1, d2) = kam_jacobians(&m, e2, a3)?;
        samples.push((x, d1, d2));
    }
    // linear Richardson in eps on the two finest samples, checked against the coarser pair
    let rich = |k: usize, f: fn(&(f64, f64, f64)) -> f64| 2.0 * f(&samples[k + 1]) - f(&samples[k]);
    let d1 = rich(2, |s| s.1);
    let d2 = rich(2, |s| s.2);
    let alpha = resonant_alpha();
    let (a, b) = (coeff_a(alpha)?, coeff_b(alpha, mc.model)?);
    Ok(KamLimit {
        samples,
        det1_limit: d1,
        det2_limit: d2,
        det1_target: 8.0 * b.powi(3) * a,
        det2_target: -16.0 * 2f64.powf(5.0 / 6.0) * b.powi(10),
    })
}
