//! Hamiltonian pieces in the `mu^{-1}`-rescaled convention.
//!
//! ```text
//! F = sum [ |pbar_i|^2/(2 mu_i) - mu_i M_i / r_i ]
//!   + mu [ sum_{i<j} pbar_i . pbar_j / m0  (full problem only)
//!          - sum_{i<j} mbar_i mbar_j / r_ij ]
//! ```

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::charts::{cart_from_delaunay, CartState, ResonanceState};
use crate::elements::{elements_to_cartesian_with, KeplerNorm, OrbitalElements};
use crate::error::{Error, Result};
use crate::laplace::{coeff_a, coeff_b, coeff_b1};
use crate::mass::{MassConfig, ModelKind};

/// Closest admissible approach between any two bodies.
pub const R_MIN: f64 = 1e-6;

/// Nodes of the trapezoid rule used by the averaging oracle.
pub const AVERAGE_NODES: usize = 4096;

/// Semi-major axis implied by the circular angular momentum of body `i`.
pub fn semi_major_axis(big_l: f64, mc: &MassConfig, i: usize) -> f64 {
    let r = big_l / mc.kepler_mu(i);
    r * r / mc.kepler_m(i)
}

/// `-sum mu_i^3 M_i^2 / (2 L_i^2)`.
pub fn f_kep_actions(big_l: &[f64], mc: &MassConfig) -> f64 {
    big_l
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let (m, k) = (mc.kepler_mu(i), mc.kepler_m(i));
            -m * m * m * k * k / (2.0 * l * l)
        })
        .sum()
}

pub fn eval_f_kep(rs: &ResonanceState, mc: &MassConfig) -> f64 {
    f_kep_actions(&rs.actions_l(), &mc.inner())
}

/// Keplerian frequencies `dF_Kep / dL_i = mu_i^3 M_i^2 / L_i^3`.
pub fn kepler_frequencies(big_l: &[f64], mc: &MassConfig) -> Vec<f64> {
    big_l
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let (m, k) = (mc.kepler_mu(i), mc.kepler_m(i));
            m * m * m * k * k / (l * l * l)
        })
        .collect()
}

pub fn f_kep_cartesian(cs: &CartState, mc: &MassConfig) -> f64 {
    (0..cs.n())
        .map(|i| {
            let (m, k) = (mc.kepler_mu(i), mc.kepler_m(i));
            let (q, p) = (cs.q[i], cs.p[i]);
            (p[0] * p[0] + p[1] * p[1]) / (2.0 * m) - m * k / q[0].hypot(q[1])
        })
        .sum()
}

/// Rescaled perturbation: mutual attraction plus, in the full problem, the
/// indirect momentum coupling.
pub fn eval_f_pert(cs: &CartState, mc: &MassConfig) -> Result<f64> {
    let n = cs.n();
    let mut direct = 0.0;
    let mut indirect = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = cs.q[i][0] - cs.q[j][0];
            let dy = cs.q[i][1] - cs.q[j][1];
            let r = dx.hypot(dy);
            if r < R_MIN {
                return Err(Error::Collision { i: i + 1, j: j + 1, r });
            }
            direct -= mc.mbar[i] * mc.mbar[j] / r;
            indirect += cs.p[i][0] * cs.p[j][0] + cs.p[i][1] * cs.p[j][1];
        }
    }
    let t1 = match mc.model {
        ModelKind::FixedCenter => 0.0,
        ModelKind::FullProblem => indirect / mc.m0,
    };
    Ok(mc.mu * (t1 + direct))
}

pub fn total_energy(cs: &CartState, mc: &MassConfig) -> Result<f64> {
    Ok(f_kep_cartesian(cs, mc) + eval_f_pert(cs, mc)?)
}

/// Ingredients of the first-order resonant normal form at one state.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ResTerms {
    pub p12: f64,
    pub p23: f64,
    pub a12: f64,
    pub b12: f64,
    pub a23: f64,
    pub b23: f64,
    pub ehat: [f64; 3],
    pub big_l: [f64; 3],
    /// Phases of `cos(d1+2e1)`, `cos(d1+e1)`, `cos(d2+2e2)`, `cos(d2+e2)`.
    pub phases: [f64; 4],
}

impl ResTerms {
    pub fn new(rs: &ResonanceState, mc: &MassConfig) -> Result<Self> {
        if mc.n() < 3 {
            return Err(Error::domain("resonant normal form needs three satellites"));
        }
        let big_l = rs.actions_l();
        let big_g = rs.actions_g();
        let a: Vec<f64> = (0..3).map(|i| semi_major_axis(big_l[i], mc, i)).collect();
        let mut ehat = [0.0; 3];
        for i in 0..3 {
            let x = big_l[i] - big_g[i];
            if x < -1e-14 * big_l[i] || !(big_l[i] > 0.0) {
                return Err(Error::domain(format!("body {}: G exceeds L", i + 1)));
            }
            ehat[i] = (2.0 * x.max(0.0) / big_l[i]).sqrt();
        }
        let (a12, a23) = (a[0] / a[1], a[1] / a[2]);
        Ok(ResTerms {
            p12: mc.mu * mc.mbar[0] * mc.mbar[1] / a[1],
            p23: mc.mu * mc.mbar[1] * mc.mbar[2] / a[2],
            a12: coeff_a(a12)?,
            b12: coeff_b(a12, mc.model)?,
            a23: coeff_a(a23)?,
            b23: coeff_b(a23, mc.model)?,
            ehat,
            big_l,
            phases: [
                rs.delta[0] + 2.0 * rs.eta[0],
                rs.delta[0] + rs.eta[0],
                rs.delta[1] + 2.0 * rs.eta[1],
                rs.delta[1] + rs.eta[1],
            ],
        })
    }

    pub fn value(&self) -> f64 {
        let c = self.phases.map(f64::cos);
        let e = self.ehat;
        self.p12 * (self.a12 * e[0] * c[0] - self.b12 * e[1] * c[1])
            + self.p23 * (self.a23 * e[1] * c[2] - self.b23 * e[2] * c[3])
    }
}

/// First-order resonant normal form (constant part omitted).
///
/// Eccentricities enter through `ehat_i = sqrt(2 (L_i - G_i) / L_i)`, which
/// agrees with `e_i` to first order and keeps `dF/dG` exactly `-1/(L ehat)`.
pub fn eval_f_res(rs: &ResonanceState, mc: &MassConfig) -> Result<f64> {
    Ok(ResTerms::new(rs, mc)?.value())
}

/// Average of `F_pert` over `delta3` at fixed slow variables, by the
/// trapezoid rule on `nodes` points. Includes the constant part.
pub fn resonant_average_numeric(rs: &ResonanceState, mc: &MassConfig, nodes: usize) -> Result<f64> {
    let inner = mc.inner();
    let mut acc = 0.0;
    for j in 0..nodes {
        let mut s = *rs;
        s.delta[2] = TAU * j as f64 / nodes as f64;
        let cs = cart_from_delaunay(&s.to_delaunay(), &inner)?;
        acc += eval_f_pert(&cs, &inner)?;
    }
    Ok(acc / nodes as f64)
}

/// The angle-independent part: the average along circular orbits with the
/// same semi-major axes.
pub fn circular_part(rs: &ResonanceState, mc: &MassConfig, nodes: usize) -> Result<f64> {
    let mut c = *rs;
    let l = rs.actions_l();
    c.z = [l[0], l[0] + l[1], l[0] + l[1] + l[2]];
    resonant_average_numeric(&c, mc, nodes)
}

/// Closed-form normal form against the numeric average at one eccentricity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub e: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_err: f64,
}

/// Slow angles of the comparison state; generic, away from the families.
pub const ORACLE_ANGLES: [f64; 4] = [0.3, -1.1, 0.7, 2.0];

/// Compares [`eval_f_res`] with the mean-subtracted numeric average on the
/// resonant circle of `a3 = 1` with all three eccentricities equal to `e`.
pub fn oracle_comparison(mc: &MassConfig, e: f64, nodes: usize) -> Result<OracleRow> {
    let circle = crate::families::resonant_circle(mc, 1.0)?;
    let l = circle.big_l;
    let g: Vec<f64> = (0..3).map(|i| l[i] * (1.0 - e * e).sqrt()).collect();
    let rs = ResonanceState {
        d: circle.d,
        delta: [ORACLE_ANGLES[0], ORACLE_ANGLES[1], 0.0],
        z: [g[0], g[0] + g[1], g[0] + g[1] + g[2]],
        eta: [ORACLE_ANGLES[2], ORACLE_ANGLES[3], 0.0],
    };
    let closed_form = eval_f_res(&rs, mc)?;
    let oracle = resonant_average_numeric(&rs, mc, nodes)? - circular_part(&rs, mc, nodes)?;
    Ok(OracleRow { e, closed_form, oracle, abs_err: (closed_form - oracle).abs() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    /// Keplerian mean motions `dF_Kep/dL_i`.
    pub nu_kep: [f64; 3],
    /// Frequencies of `(delta1, delta2, delta3)`: `dF_Kep/dD_i`.
    pub nu_delta: [f64; 3],
    /// Pericentre frequencies `dF_res/dG_i`.
    pub nu_g: [f64; 3],
    /// `(nu_g1 - nu_g2, nu_g2 - nu_g3)`.
    pub nu_rel: [f64; 2],
}

pub fn pericentre_frequencies(rs: &ResonanceState, mc: &MassConfig) -> Result<FrequencyReport> {
    let t = ResTerms::new(rs, mc)?;
    if t.ehat.contains(&0.0) {
        return Err(Error::domain("pericentre frequencies are singular at zero eccentricity"));
    }
    let c = t.phases.map(f64::cos);
    let (l, e) = (t.big_l, t.ehat);
    let nu_g = [
        -t.p12 * t.a12 * c[0] / (l[0] * e[0]),
        (t.p12 * t.b12 * c[1] - t.p23 * t.a23 * c[2]) / (l[1] * e[1]),
        t.p23 * t.b23 * c[3] / (l[2] * e[2]),
    ];
    let n = kepler_frequencies(&l, &mc.inner());
    Ok(FrequencyReport {
        nu_kep: [n[0], n[1], n[2]],
        nu_delta: [n[0] - 2.0 * n[1], n[1] - 2.0 * n[2], n[2]],
        nu_g,
        nu_rel: [nu_g[0] - nu_g[1], nu_g[1] - nu_g[2]],
    })
}

/// Weight `kappa` of the quadratic secular term `mu mbar4 kappa (xi4^2 + eta4^2)`:
/// `mbar1 B1(a1,a4)/2 + mbar2 B1(a2,a4)/4 + mbar3 B1(a3,a4)/8`.
pub fn secular_callisto_coefficient(mc: &MassConfig, a: [f64; 4]) -> Result<f64> {
    if !(a[0] < a[1] && a[1] < a[2] && a[2] < a[3] && a[0] > 0.0) {
        return Err(Error::domain(format!("semi-major axes must increase, got {a:?}")));
    }
    if mc.n() < 3 {
        return Err(Error::domain("secular coefficient needs the three inner masses"));
    }
    let w = [0.5, 0.25, 0.125];
    let mut k = 0.0;
    for i in 0..3 {
        k += mc.mbar[i] * w[i] * coeff_b1(a[i], a[3])?;
    }
    Ok(k)
}

/// `max_i |<pbar_i . pbar_4>|` averaged over both mean anomalies by an
/// `n x n` tensor-product trapezoid rule.
pub fn indirect_average_check(mc: &MassConfig, els: &[OrbitalElements], n: usize) -> Result<f64> {
    if els.len() != 4 || mc.n() != 4 {
        return Err(Error::domain("indirect average check needs four satellites"));
    }
    let momenta = |body: usize| -> Result<Vec<[f64; 2]>> {
        (0..n)
            .map(|j| {
                let mut el = els[body];
                el.l = TAU * j as f64 / n as f64;
                Ok(elements_to_cartesian_with(&el, KeplerNorm::of(mc, body))?.1)
            })
            .collect()
    };
    let p4 = momenta(3)?;
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let pi = momenta(i)?;
        let mut acc = 0.0;
        for a in &pi {
            for b in &p4 {
                acc += a[0] * b[0] + a[1] * b[1];
            }
        }
        worst = worst.max((acc / (n * n) as f64).abs());
    }
    Ok(worst)
}

/// Bundles a mass configuration with the pieces of the Hamiltonian it uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianModel {
    pub mc: MassConfig,
    pub nbodies: usize,
    pub include_indirect: bool,
}

impl HamiltonianModel {
    pub fn new(mc: MassConfig) -> Self {
        let include_indirect = mc.model == ModelKind::FullProblem;
        HamiltonianModel { nbodies: mc.n(), include_indirect, mc }
    }

    pub fn energy(&self, cs: &CartState) -> Result<f64> {
        total_energy(cs, &self.mc)
    }
}
