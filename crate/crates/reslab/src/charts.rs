//! Canonical charts: Delaunay, resonance-adapted, the fourth-body extension,
//! Joviancentric reduction and momentum rescaling.

use serde::{Deserialize, Serialize};

use crate::angles::wrap;
use crate::elements::{
    cartesian_to_elements_with, element_partials, elements_to_cartesian_with, KeplerNorm, OrbitalElements,
};
use crate::error::{Error, Result};
use crate::mass::MassConfig;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelaunayBody {
    /// Circular angular momentum `mu_i sqrt(M_i a)`.
    pub big_l: f64,
    pub l: f64,
    /// Angular momentum `L sqrt(1 - e^2)`.
    pub big_g: f64,
    pub g: f64,
}

impl DelaunayBody {
    pub fn from_elements(el: &OrbitalElements, kn: KeplerNorm) -> Self {
        let big_l = kn.mu_i * (kn.m * el.a).sqrt();
        let big_g = big_l * ((1.0 - el.e) * (1.0 + el.e)).sqrt();
        DelaunayBody { big_l, l: el.l, big_g, g: el.g }
    }

    pub fn to_elements(&self, kn: KeplerNorm) -> Result<OrbitalElements> {
        if !(self.big_l > 0.0) || !(self.big_g > 0.0) || self.big_g > self.big_l * (1.0 + 1e-15) {
            return Err(Error::domain(format!(
                "Delaunay actions need 0 < G <= L (L = {}, G = {})",
                self.big_l, self.big_g
            )));
        }
        let r = self.big_l / kn.mu_i;
        let a = r * r / kn.m;
        let diff = (self.big_l - self.big_g).max(0.0);
        let e = (diff * (self.big_l + self.big_g)).sqrt() / self.big_l;
        OrbitalElements::new(a, e, self.l, self.g)
    }

    pub fn eccentricity(&self) -> f64 {
        ((self.big_l - self.big_g).max(0.0) * (self.big_l + self.big_g)).sqrt() / self.big_l
    }
}

/// Partials of `(x, y, pbar_x, pbar_y)` with respect to `(L, l, G, g)`.
/// Undefined on circular orbits.
pub fn delaunay_partials(b: &DelaunayBody, kn: KeplerNorm) -> Result<[[f64; 4]; 4]> {
    let el = b.to_elements(kn)?;
    if el.e == 0.0 {
        return Err(Error::Degeneracy("Delaunay partials need a nonzero eccentricity".into()));
    }
    let part = element_partials(el.a, el.e, el.l, el.g, kn)?;
    let (big_l, big_g) = (b.big_l, b.big_g);
    let da_dl = 2.0 * el.a / big_l;
    let de_dl = big_g * big_g / (big_l.powi(3) * el.e);
    let de_dg = -big_g / (big_l * big_l * el.e);
    Ok(std::array::from_fn(|r| {
        let p = part[r];
        [p[0] * da_dl + p[1] * de_dl, p[2], p[1] * de_dg, p[3]]
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelaunayState {
    pub bodies: Vec<DelaunayBody>,
}

/// `(D, delta, Z, eta)` for the inner three satellites.
///
/// `D = (L1, 2L1+L2, 4L1+2L2+L3)`, `delta = (l1-2l2, l2-2l3, l3)`,
/// `Z = (G1, G1+G2, G1+G2+G3)`, `eta = (g1-g2, g2-g3, g3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceState {
    pub d: [f64; 3],
    pub delta: [f64; 3],
    pub z: [f64; 3],
    pub eta: [f64; 3],
}

impl ResonanceState {
    pub fn from_delaunay(ds: &DelaunayState) -> Result<Self> {
        if ds.bodies.len() < 3 {
            return Err(Error::domain("resonance chart needs three bodies"));
        }
        let b = &ds.bodies;
        let (l1, l2, l3) = (b[0].big_l, b[1].big_l, b[2].big_l);
        let (g1, g2, g3) = (b[0].big_g, b[1].big_g, b[2].big_g);
        Ok(ResonanceState {
            d: [l1, 2.0 * l1 + l2, 4.0 * l1 + 2.0 * l2 + l3],
            delta: [wrap(b[0].l - 2.0 * b[1].l), wrap(b[1].l - 2.0 * b[2].l), wrap(b[2].l)],
            z: [g1, g1 + g2, g1 + g2 + g3],
            eta: [wrap(b[0].g - b[1].g), wrap(b[1].g - b[2].g), wrap(b[2].g)],
        })
    }

    pub fn actions_l(&self) -> [f64; 3] {
        [self.d[0], self.d[1] - 2.0 * self.d[0], self.d[2] - 2.0 * self.d[1]]
    }

    pub fn actions_g(&self) -> [f64; 3] {
        [self.z[0], self.z[1] - self.z[0], self.z[2] - self.z[1]]
    }

    pub fn mean_anomalies(&self) -> [f64; 3] {
        let l3 = self.delta[2];
        let l2 = self.delta[1] + 2.0 * l3;
        let l1 = self.delta[0] + 2.0 * l2;
        [l1, l2, l3]
    }

    pub fn pericentres(&self) -> [f64; 3] {
        let g3 = self.eta[2];
        let g2 = self.eta[1] + g3;
        let g1 = self.eta[0] + g2;
        [g1, g2, g3]
    }

    pub fn to_delaunay(&self) -> DelaunayState {
        let big_l = self.actions_l();
        let big_g = self.actions_g();
        let l = self.mean_anomalies();
        let g = self.pericentres();
        DelaunayState {
            bodies: (0..3)
                .map(|i| DelaunayBody { big_l: big_l[i], l: wrap(l[i]), big_g: big_g[i], g: wrap(g[i]) })
                .collect(),
        }
    }

    /// Eccentricities implied by the actions.
    pub fn eccentricities(&self) -> [f64; 3] {
        let d = self.to_delaunay();
        [d.bodies[0].eccentricity(), d.bodies[1].eccentricity(), d.bodies[2].eccentricity()]
    }

    pub fn to_vec(&self) -> [f64; 12] {
        let mut v = [0.0; 12];
        v[0..3].copy_from_slice(&self.d);
        v[3..6].copy_from_slice(&self.delta);
        v[6..9].copy_from_slice(&self.z);
        v[9..12].copy_from_slice(&self.eta);
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        ResonanceState {
            d: [v[0], v[1], v[2]],
            delta: [v[3], v[4], v[5]],
            z: [v[6], v[7], v[8]],
            eta: [v[9], v[10], v[11]],
        }
    }
}

/// Chart of the four-satellite problem: the inner resonance chart with
/// `Z3' = G1+G2+G3+G4` in place of `Z3`, plus `(Lambda4, lambda4, xi4, eta4)`
/// where `lambda4 = l4 + g4 - g3` and `xi4 + i eta4 = sqrt(2(L4-G4)) e^{-i(g4-g3)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallistoState {
    pub inner: ResonanceState,
    pub big_lambda4: f64,
    pub lambda4: f64,
    pub xi4: f64,
    pub eta4: f64,
}

impl CallistoState {
    pub fn from_delaunay(ds: &DelaunayState) -> Result<Self> {
        if ds.bodies.len() != 4 {
            return Err(Error::domain("the fourth-body chart needs four bodies"));
        }
        let mut inner = ResonanceState::from_delaunay(ds)?;
        let b4 = ds.bodies[3];
        let g3 = ds.bodies[2].g;
        inner.z[2] += b4.big_g;
        let rho = (2.0 * (b4.big_l - b4.big_g)).max(0.0).sqrt();
        let phase = -(b4.g - g3);
        Ok(CallistoState {
            inner,
            big_lambda4: b4.big_l,
            lambda4: wrap(b4.l + b4.g - g3),
            xi4: rho * phase.cos(),
            eta4: rho * phase.sin(),
        })
    }

    pub fn g4(&self) -> f64 {
        self.big_lambda4 - 0.5 * (self.xi4 * self.xi4 + self.eta4 * self.eta4)
    }

    pub fn to_delaunay(&self) -> DelaunayState {
        let g4 = self.g4();
        let mut inner = self.inner;
        inner.z[2] -= g4;
        let mut ds = inner.to_delaunay();
        let g3 = inner.eta[2];
        let rel = if self.xi4 == 0.0 && self.eta4 == 0.0 { 0.0 } else { -self.eta4.atan2(self.xi4) };
        ds.bodies.push(DelaunayBody {
            big_l: self.big_lambda4,
            l: wrap(self.lambda4 - rel),
            big_g: g4,
            g: wrap(g3 + rel),
        });
        ds
    }
}

/// Joviancentric positions and rescaled momenta of the satellites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartState {
    pub q: Vec<[f64; 2]>,
    pub p: Vec<[f64; 2]>,
}

impl CartState {
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Total angular momentum `sum q x pbar`; equals `Z3` (or `Z3'`).
    pub fn angular_momentum(&self) -> f64 {
        self.q.iter().zip(&self.p).map(|(q, p)| q[0] * p[1] - q[1] * p[0]).sum()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(4 * self.n());
        for q in &self.q {
            v.extend_from_slice(q);
        }
        for p in &self.p {
            v.extend_from_slice(p);
        }
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let n = v.len() / 4;
        CartState {
            q: (0..n).map(|i| [v[2 * i], v[2 * i + 1]]).collect(),
            p: (0..n).map(|i| [v[2 * n + 2 * i], v[2 * n + 2 * i + 1]]).collect(),
        }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let rot = |v: &[f64; 2]| [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        CartState { q: self.q.iter().map(rot).collect(), p: self.p.iter().map(rot).collect() }
    }
}

pub fn cart_from_elements(els: &[OrbitalElements], mc: &MassConfig) -> Result<CartState> {
    if els.len() != mc.n() {
        return Err(Error::domain(format!("{} element sets for {} satellites", els.len(), mc.n())));
    }
    let mut q = Vec::with_capacity(els.len());
    let mut p = Vec::with_capacity(els.len());
    for (i, el) in els.iter().enumerate() {
        let (qi, pi) = elements_to_cartesian_with(el, KeplerNorm::of(mc, i))?;
        q.push(qi);
        p.push(pi);
    }
    Ok(CartState { q, p })
}

/// Elements of every body plus per-body circularity flags.
pub fn elements_from_cart(cs: &CartState, mc: &MassConfig) -> Result<(Vec<OrbitalElements>, Vec<bool>)> {
    let mut els = Vec::with_capacity(cs.n());
    let mut flags = Vec::with_capacity(cs.n());
    for i in 0..cs.n() {
        let c = cartesian_to_elements_with(cs.q[i], cs.p[i], KeplerNorm::of(mc, i), i)?;
        els.push(c.elements);
        flags.push(c.circular);
    }
    Ok((els, flags))
}

pub fn delaunay_from_elements(els: &[OrbitalElements], mc: &MassConfig) -> DelaunayState {
    DelaunayState {
        bodies: els.iter().enumerate().map(|(i, el)| DelaunayBody::from_elements(el, KeplerNorm::of(mc, i))).collect(),
    }
}

pub fn elements_from_delaunay(ds: &DelaunayState, mc: &MassConfig) -> Result<Vec<OrbitalElements>> {
    ds.bodies.iter().enumerate().map(|(i, b)| b.to_elements(KeplerNorm::of(mc, i))).collect()
}

pub fn cart_from_delaunay(ds: &DelaunayState, mc: &MassConfig) -> Result<CartState> {
    cart_from_elements(&elements_from_delaunay(ds, mc)?, mc)
}

pub fn delaunay_from_cart(cs: &CartState, mc: &MassConfig) -> Result<DelaunayState> {
    Ok(delaunay_from_elements(&elements_from_cart(cs, mc)?.0, mc))
}

pub fn cart_from_resonance(rs: &ResonanceState, mc: &MassConfig) -> Result<CartState> {
    cart_from_delaunay(&rs.to_delaunay(), &mc.inner())
}

pub fn resonance_from_cart(cs: &CartState, mc: &MassConfig) -> Result<ResonanceState> {
    ResonanceState::from_delaunay(&delaunay_from_cart(cs, mc)?)
}

/// Absolute planar positions and momenta of the planet (index 0) and satellites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsoluteState {
    pub q: Vec<[f64; 2]>,
    pub p: Vec<[f64; 2]>,
}

/// `q~_0 = q_0`, `q~_i = q_i - q_0`, `p~_0 = sum p`, `p~_i = p_i`.
pub fn to_joviancentric(abs: &AbsoluteState) -> AbsoluteState {
    let q0 = abs.q[0];
    let mut q = abs.q.clone();
    for qi in q.iter_mut().skip(1) {
        qi[0] -= q0[0];
        qi[1] -= q0[1];
    }
    let mut p = abs.p.clone();
    p[0] = abs.p.iter().fold([0.0, 0.0], |acc, pi| [acc[0] + pi[0], acc[1] + pi[1]]);
    AbsoluteState { q, p }
}

pub fn from_joviancentric(jc: &AbsoluteState) -> AbsoluteState {
    let q0 = jc.q[0];
    let mut q = jc.q.clone();
    for qi in q.iter_mut().skip(1) {
        qi[0] += q0[0];
        qi[1] += q0[1];
    }
    let mut p = jc.p.clone();
    let rest = jc.p.iter().skip(1).fold([0.0, 0.0], |acc, pi| [acc[0] + pi[0], acc[1] + pi[1]]);
    p[0] = [jc.p[0][0] - rest[0], jc.p[0][1] - rest[1]];
    AbsoluteState { q, p }
}

/// Satellite part of a Joviancentric state with `pbar = p~ / mu`.
pub fn rescale_momenta(jc: &AbsoluteState, mu: f64) -> Result<CartState> {
    if !(mu > 0.0) {
        return Err(Error::domain("momentum rescaling needs mu > 0"));
    }
    Ok(CartState {
        q: jc.q[1..].to_vec(),
        p: jc.p[1..].iter().map(|p| [p[0] / mu, p[1] / mu]).collect(),
    })
}

/// Inverse of [`rescale_momenta`], with the planet at rest at the origin of
/// the barycentric frame (`q~_0`, `p~_0` supplied by the caller).
pub fn unscale_momenta(cs: &CartState, mu: f64, q0: [f64; 2], p0: [f64; 2]) -> AbsoluteState {
    let mut q = vec![q0];
    q.extend_from_slice(&cs.q);
    let mut p = vec![p0];
    p.extend(cs.p.iter().map(|p| [p[0] * mu, p[1] * mu]));
    AbsoluteState { q, p }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_map_example() {
        let b = DelaunayBody { big_l: 1.0, l: 0.0, big_g: 1.0, g: 0.0 };
        let ds = DelaunayState { bodies: vec![b; 3] };
        let rs = ResonanceState::from_delaunay(&ds).unwrap();
        assert_eq!(rs.d, [1.0, 3.0, 7.0]);
        assert_eq!(rs.delta, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn angle_reduction() {
        let mut ds = DelaunayState {
            bodies: vec![DelaunayBody { big_l: 1.0, l: 0.0, big_g: 0.9, g: 0.0 }; 3],
        };
        ds.bodies[0].l = 2.0 * std::f64::consts::PI;
        ds.bodies[1].l = std::f64::consts::PI;
        let rs = ResonanceState::from_delaunay(&ds).unwrap();
        assert!(rs.delta[0].abs() < 1e-15);
    }

    #[test]
    fn joviancentric_trivial() {
        let abs = AbsoluteState { q: vec![[0.0, 0.0], [1.0, 2.0]], p: vec![[-0.5, 0.1], [0.5, -0.1]] };
        let jc = to_joviancentric(&abs);
        assert_eq!(jc.q[1], [1.0, 2.0]);
        assert_eq!(jc.p[0], [0.0, 0.0]);
        let back = from_joviancentric(&jc);
        assert_eq!(back, abs);
    }
}
