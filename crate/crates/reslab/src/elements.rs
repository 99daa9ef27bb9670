//! Planar Keplerian elements and their Cartesian realization.

use serde::{Deserialize, Serialize};

use crate::angles::wrap;
use crate::error::{Error, Result};
use crate::kepler::solve_kepler;
use crate::mass::MassConfig;

/// Below this eccentricity the pericentre is treated as undefined.
pub const CIRCULAR_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    pub a: f64,
    pub e: f64,
    pub l: f64,
    pub g: f64,
}

impl OrbitalElements {
    pub fn new(a: f64, e: f64, l: f64, g: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::domain(format!("semi-major axis must be positive, got {a}")));
        }
        if !(0.0..1.0).contains(&e) {
            return Err(Error::domain(format!("eccentricity must lie in [0, 1), got {e}")));
        }
        Ok(OrbitalElements { a, e, l, g })
    }
}

/// Kepler normalization `(mu_i, M_i)` of one body.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeplerNorm {
    pub mu_i: f64,
    pub m: f64,
}

impl KeplerNorm {
    pub fn of(mc: &MassConfig, body: usize) -> Self {
        KeplerNorm { mu_i: mc.kepler_mu(body), m: mc.kepler_m(body) }
    }
}

/// Result of inverting a Cartesian state; `circular` flags an undefined pericentre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Converted {
    pub elements: OrbitalElements,
    pub circular: bool,
}

/// Partials of `(x, y, px, py)` of one body with respect to `(a, e, l, g)`.
pub fn element_partials(a: f64, e: f64, l: f64, g: f64, kn: KeplerNorm) -> Result<[[f64; 4]; 4]> {
    let big_e = solve_kepler(l, e)?;
    let (se, ce) = big_e.sin_cos();
    let beta = ((1.0 - e) * (1.0 + e)).sqrt();
    let an = (kn.m / a).sqrt();
    let den = 1.0 - e * ce;
    let pf = [a * (ce - e), a * beta * se, -an * se / den, an * beta * ce / den];
    // Perifocal partials at fixed E, then along E.
    let d_a = [pf[0] / a, pf[1] / a, -pf[2] / (2.0 * a), -pf[3] / (2.0 * a)];
    let d_e_fixed = [
        -a,
        -a * e / beta * se,
        -an * se * ce / (den * den),
        an * ce * (beta * ce - e * den / beta) / (den * den),
    ];
    let d_big_e = [
        -a * se,
        a * beta * ce,
        -an * (ce - e) / (den * den),
        -an * beta * se / (den * den),
    ];
    let (de_dl, de_de) = (1.0 / den, se / den);
    let (sg, cg) = g.sin_cos();
    let rot = |v: [f64; 4]| {
        [cg * v[0] - sg * v[1], sg * v[0] + cg * v[1], kn.mu_i * (cg * v[2] - sg * v[3]), kn.mu_i * (sg * v[2] + cg * v[3])]
    };
    let ca = rot(d_a);
    let ce_col = rot(std::array::from_fn(|k| d_e_fixed[k] + d_big_e[k] * de_de));
    let cl = rot(std::array::from_fn(|k| d_big_e[k] * de_dl));
    let p = rot(pf);
    let cgc = [-p[1], p[0], -p[3], p[2]];
    Ok(std::array::from_fn(|r| [ca[r], ce_col[r], cl[r], cgc[r]]))
}

/// Position and rescaled momentum `pbar = mu_i * velocity`.
pub fn elements_to_cartesian(el: &OrbitalElements, mc: &MassConfig, body: usize) -> Result<([f64; 2], [f64; 2])> {
    if body >= mc.n() {
        return Err(Error::domain(format!("body index {body} out of range")));
    }
    elements_to_cartesian_with(el, KeplerNorm::of(mc, body))
}

pub fn elements_to_cartesian_with(el: &OrbitalElements, kn: KeplerNorm) -> Result<([f64; 2], [f64; 2])> {
    let OrbitalElements { a, e, l, g } = *el;
    let big_e = solve_kepler(l, e)?;
    let (se, ce) = big_e.sin_cos();
    let beta = ((1.0 - e) * (1.0 + e)).sqrt();
    let n = (kn.m / (a * a * a)).sqrt();
    let edot = n / (1.0 - e * ce);
    let x = a * (ce - e);
    let y = a * beta * se;
    let vx = -a * se * edot;
    let vy = a * beta * ce * edot;
    let (sg, cg) = g.sin_cos();
    let pos = [cg * x - sg * y, sg * x + cg * y];
    let vel = [cg * vx - sg * vy, sg * vx + cg * vy];
    Ok((pos, [kn.mu_i * vel[0], kn.mu_i * vel[1]]))
}

pub fn cartesian_to_elements(pos: [f64; 2], mom: [f64; 2], mc: &MassConfig, body: usize) -> Result<Converted> {
    if body >= mc.n() {
        return Err(Error::domain(format!("body index {body} out of range")));
    }
    cartesian_to_elements_with(pos, mom, KeplerNorm::of(mc, body), body)
}

pub fn cartesian_to_elements_with(pos: [f64; 2], mom: [f64; 2], kn: KeplerNorm, body: usize) -> Result<Converted> {
    let gm = kn.m;
    let v = [mom[0] / kn.mu_i, mom[1] / kn.mu_i];
    let r = pos[0].hypot(pos[1]);
    let v2 = v[0] * v[0] + v[1] * v[1];
    let energy = 0.5 * v2 - gm / r;
    if !(energy < 0.0) {
        return Err(Error::Hyperbolic { body, energy });
    }
    let h = pos[0] * v[1] - pos[1] * v[0];
    if !(h > 0.0) {
        return Err(Error::domain(format!("body {body}: retrograde or radial orbit (h = {h:e})")));
    }
    let a = -gm / (2.0 * energy);
    let ex = v[1] * h / gm - pos[0] / r;
    let ey = -v[0] * h / gm - pos[1] / r;
    let e = ex.hypot(ey);
    if e < CIRCULAR_EPS {
        let lam = pos[1].atan2(pos[0]);
        return Ok(Converted { elements: OrbitalElements { a, e, l: wrap(lam), g: 0.0 }, circular: true });
    }
    let g = ey.atan2(ex);
    let ecos = 1.0 - r / a;
    let esin = (pos[0] * v[0] + pos[1] * v[1]) / (gm * a).sqrt();
    let big_e = esin.atan2(ecos);
    let l = big_e - esin;
    Ok(Converted { elements: OrbitalElements { a, e, l: wrap(l), g: wrap(g) }, circular: false })
}

/// Two-body energy `|p|^2/(2 mu_i) - mu_i M_i / r`.
pub fn two_body_energy(pos: [f64; 2], mom: [f64; 2], kn: KeplerNorm) -> f64 {
    (mom[0] * mom[0] + mom[1] * mom[1]) / (2.0 * kn.mu_i) - kn.mu_i * kn.m / pos[0].hypot(pos[1])
}

/// Adjacent orbits must not overlap: `a_i (1 + e_hat) < a_{i+1} (1 - e_hat)`.
pub fn check_separation(els: &[OrbitalElements], e_hat: f64) -> Result<()> {
    if !(0.0..1.0).contains(&e_hat) {
        return Err(Error::domain(format!("eccentricity bound must lie in [0, 1), got {e_hat}")));
    }
    for (i, w) in els.windows(2).enumerate() {
        if w[0].e > e_hat || w[1].e > e_hat {
            return Err(Error::domain(format!("eccentricity above bound {e_hat} near body {i}")));
        }
        if !(w[0].a * (1.0 + e_hat) < w[1].a * (1.0 - e_hat)) {
            return Err(Error::domain(format!(
                "orbits {i} and {} are not separated for e_hat = {e_hat}",
                i + 1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass::ModelKind;

    #[test]
    fn circular_pericentre_state() {
        let mc = MassConfig::galilean(ModelKind::FixedCenter);
        let el = OrbitalElements::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let (q, p) = elements_to_cartesian(&el, &mc, 0).unwrap();
        assert_eq!(q, [1.0, 0.0]);
        assert!(p[0].abs() < 1e-15 && p[1] > 0.0);
        let back = cartesian_to_elements(q, p, &mc, 0).unwrap();
        assert!(back.circular);
    }

    #[test]
    fn vis_viva() {
        let mc = MassConfig::new(1.0, vec![1.0], 1e-3, ModelKind::FixedCenter).unwrap();
        let el = OrbitalElements::new(1.0, 0.2, 0.7, 0.3).unwrap();
        let (q, p) = elements_to_cartesian(&el, &mc, 0).unwrap();
        let en = two_body_energy(q, p, KeplerNorm::of(&mc, 0));
        assert!((en + 0.5).abs() < 1e-14);
    }

    #[test]
    fn unbound_is_rejected() {
        let mc = MassConfig::galilean(ModelKind::FixedCenter);
        let err = cartesian_to_elements([1.0, 0.0], [0.0, 1.5], &mc, 0).unwrap_err();
        assert!(matches!(err, Error::Hyperbolic { .. }));
    }

    #[test]
    fn separation() {
        let a = OrbitalElements::new(1.0, 0.1, 0.0, 0.0).unwrap();
        let b = OrbitalElements::new(1.1, 0.1, 0.0, 0.0).unwrap();
        assert!(check_separation(&[a, b], 0.1).is_err());
        let c = OrbitalElements::new(2.0, 0.1, 0.0, 0.0).unwrap();
        assert!(check_separation(&[a, c], 0.1).is_ok());
    }
}
