//! Kepler's equation and the two-body drift.

use std::f64::consts::PI;

use crate::angles::wrap;
use crate::error::{Error, Result};

const KEPLER_TOL: f64 = 1e-15;

/// Eccentric anomaly `E` with `E - e sin E = l`.
///
/// Newton from a third-order start, with bisection on the bracket `[-pi, pi]`
/// of the reduced anomaly as a fallback. The result is continuous in `l`.
pub fn solve_kepler(l: f64, e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::domain(format!("Kepler's equation needs 0 <= e < 1, got {e}")));
    }
    let m = wrap(l);
    let shift = l - m;
    if e == 0.0 {
        return Ok(l);
    }
    let (s, c) = m.sin_cos();
    let mut x = m + e * s * (1.0 + e * c);
    if e > 0.8 {
        x = if m >= 0.0 { PI } else { -PI };
    }
    for _ in 0..50 {
        let f = x - e * x.sin() - m;
        let fp = 1.0 - e * x.cos();
        let dx = f / fp;
        x -= dx;
        if dx.abs() <= KEPLER_TOL * (1.0 + x.abs()) {
            let r = x - e * x.sin() - m;
            if r.abs() < 1e-13 {
                return Ok(x + shift);
            }
        }
    }
    Ok(kepler_bisection(m, e) + shift)
}

/// Reference solution by bisection of the monotone map `E -> E - e sin E`.
pub fn kepler_bisection(l: f64, e: f64) -> f64 {
    let m = wrap(l);
    let (mut lo, mut hi) = (-PI - 1e-9, PI + 1e-9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid - e * mid.sin() < m {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi) + (l - m)
}

/// Exact two-body propagation of `(q, v)` under attracting mass `gm` for `dt`.
///
/// Gauss f and g functions with the eccentric-anomaly increment obtained
/// from the difference form of Kepler's equation.
pub fn kepler_drift(q: [f64; 2], v: [f64; 2], gm: f64, dt: f64) -> Result<([f64; 2], [f64; 2])> {
    let r0 = q[0].hypot(q[1]);
    let v2 = v[0] * v[0] + v[1] * v[1];
    let inv_a = 2.0 / r0 - v2 / gm;
    if !(inv_a > 0.0) {
        return Err(Error::domain("Kepler drift requires a bound orbit"));
    }
    let a = 1.0 / inv_a;
    let n = (gm * inv_a * inv_a * inv_a).sqrt();
    let sqrt_gma = (gm * a).sqrt();
    let ec = 1.0 - r0 * inv_a; // e cos E0
    let es = (q[0] * v[0] + q[1] * v[1]) / sqrt_gma; // e sin E0
    let ndt = n * dt;
    let full = (ndt / (2.0 * PI)).round() * 2.0 * PI;
    let m = ndt - full;
    // dE - ec sin dE + es (1 - cos dE) = m
    let mut x = m;
    for _ in 0..60 {
        let (s, c) = x.sin_cos();
        let f = x - ec * s + es * (1.0 - c) - m;
        let fp = 1.0 - ec * c + es * s;
        let fpp = ec * s + es * c;
        let dx = -f / (fp - 0.5 * f * fpp / fp);
        x += dx;
        if dx.abs() < 1e-16 {
            break;
        }
    }
    let s = x.sin();
    let h = (0.5 * x).sin();
    let one_minus_c = 2.0 * h * h;
    let r = a * (1.0 - ec + ec * one_minus_c + es * s);
    // increments f - 1 and gdot - 1 keep the update at the size of the step
    let fm1 = -a / r0 * one_minus_c;
    // dt - (dE - sin dE)/n with the whole revolutions cancelled analytically
    let g = (m - x + s) / n;
    let fdot = -sqrt_gma / (r * r0) * s;
    let gdm1 = -a / r * one_minus_c;
    let q1 = [q[0] + (fm1 * q[0] + g * v[0]), q[1] + (fm1 * q[1] + g * v[1])];
    let v1 = [v[0] + (fdot * q[0] + gdm1 * v[0]), v[1] + (fdot * q[1] + gdm1 * v[1])];
    Ok((q1, v1))
}
