//! Laplace coefficients and the first-order resonant coefficients.
//!
//! `b_s^(k)(alpha) = (1/pi) int_0^{2pi} cos(k t) (1 - 2 alpha cos t + alpha^2)^(-s) dt`.
//! For `alpha <= 0.7` the hypergeometric series is summed; above that the
//! trapezoid rule (spectrally accurate for this periodic integrand) is used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mass::ModelKind;

/// Distance kept from the divergence boundary `alpha = 1`.
pub const ALPHA_GUARD: f64 = 1e-6;

/// Largest ratio for which the power series is used.
pub const SERIES_MAX_ALPHA: f64 = 0.7;

/// Semi-major-axis ratio of adjacent bodies on the exact 4:2:1 chain.
pub fn resonant_alpha() -> f64 {
    4f64.powf(-1.0 / 3.0)
}

/// Historical value of `2 B` for the full problem quoted in the older
/// literature. Kept for commentary only; it is not reproduced by this crate.
pub const HISTORICAL_2B_FULL: f64 = 0.964;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceQuery {
    pub s: f64,
    pub k: u32,
    pub alpha: f64,
}

impl LaplaceQuery {
    /// Negative orders are folded onto `|k|`, since `b^(-k) = b^(k)`.
    pub fn new(s: f64, k: i32, alpha: f64) -> Result<Self> {
        check(s, alpha)?;
        Ok(LaplaceQuery { s, k: k.unsigned_abs(), alpha })
    }
}

fn check(s: f64, alpha: f64) -> Result<()> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("Laplace exponent must be positive, got {s}")));
    }
    if !(0.0..1.0 - ALPHA_GUARD).contains(&alpha) {
        return Err(Error::domain(format!("alpha = {alpha} outside [0, 1 - {ALPHA_GUARD:e})")));
    }
    Ok(())
}

/// `b_s^(k)(alpha)`.
pub fn laplace_b(s: f64, k: i32, alpha: f64) -> Result<f64> {
    let q = LaplaceQuery::new(s, k, alpha)?;
    if q.alpha <= SERIES_MAX_ALPHA {
        Ok(series(q.s, q.k, q.alpha))
    } else {
        quadrature_converged(q.s, q.k, q.alpha)
    }
}

fn series(s: f64, k: u32, alpha: f64) -> f64 {
    // 2 (s)_k / k! alpha^k * 2F1(s, s+k; k+1; alpha^2)
    let mut lead = 2.0;
    for j in 0..k {
        lead *= (s + j as f64) / (j as f64 + 1.0) * alpha;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let a2 = alpha * alpha;
    let kf = k as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..10_000 {
        let nf = n as f64;
        term *= (s + nf) * (s + kf + nf) / ((nf + 1.0) * (kf + 1.0 + nf)) * a2;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Trapezoid rule on `n` equispaced nodes of the defining integral.
pub fn laplace_b_quadrature(s: f64, k: i32, alpha: f64, n: usize) -> f64 {
    let mut acc = 0.0;
    let kf = k as f64;
    for j in 0..n {
        let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        acc += (kf * t).cos() * (1.0 - 2.0 * alpha * t.cos() + alpha * alpha).powf(-s);
    }
    2.0 * acc / n as f64
}

fn quadrature_converged(s: f64, k: u32, alpha: f64) -> Result<f64> {
    let mut n = 256;
    let mut prev = laplace_b_quadrature(s, k as i32, alpha, n);
    while n < 1 << 24 {
        n *= 2;
        let next = laplace_b_quadrature(s, k as i32, alpha, n);
        if (next - prev).abs() <= 1e-14 * next.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::convergence("Laplace quadrature", (prev).abs()))
}

/// Coefficient of `e1 cos(l1 - 2 l2 + 2 g1 - 2 g2)` (times `m1 m2 / a2`).
///
/// Equals `2 b_{1/2}^(2) + alpha/2 * d/dalpha b_{1/2}^(2)` with the derivative
/// expressed through `b_{3/2}`.
pub fn coeff_a(alpha: f64) -> Result<f64> {
    let b12_2 = laplace_b(0.5, 2, alpha)?;
    let d = laplace_b(1.5, 1, alpha)? - 2.0 * alpha * laplace_b(1.5, 2, alpha)? + laplace_b(1.5, 3, alpha)?;
    Ok(2.0 * b12_2 + 0.25 * alpha * d)
}

/// Coefficient of `-e2 cos(l1 - 2 l2 + g1 - g2)`.
///
/// The full problem subtracts the indirect contribution `alpha^(-1/2)`.
pub fn coeff_b(alpha: f64, model: ModelKind) -> Result<f64> {
    let b12_1 = laplace_b(0.5, 1, alpha)?;
    let d = laplace_b(1.5, 0, alpha)? - 2.0 * alpha * laplace_b(1.5, 1, alpha)? + laplace_b(1.5, 2, alpha)?;
    let direct = 1.5 * b12_1 + 0.25 * alpha * d;
    Ok(match model {
        ModelKind::FixedCenter => direct,
        ModelKind::FullProblem => direct - indirect_shift(alpha)?,
    })
}

/// `alpha^(-1/2)`, equal to the cube root of two on the 4:2:1 chain.
pub fn indirect_shift(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain("indirect shift needs alpha > 0"));
    }
    Ok(alpha.powf(-0.5))
}

/// `B1(a, a') = a / a'^2 * b_{3/2}^(1)(a / a')`.
pub fn coeff_b1(a: f64, a_prime: f64) -> Result<f64> {
    if !(a > 0.0 && a < a_prime) {
        return Err(Error::domain(format!("B1 requires 0 < a < a', got a={a}, a'={a_prime}")));
    }
    Ok(a / (a_prime * a_prime) * laplace_b(1.5, 1, a / a_prime)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonantCoeffs {
    pub a_bar: f64,
    pub b_bar: f64,
    pub model: ModelKind,
}

impl ResonantCoeffs {
    pub fn new(alpha: f64, model: ModelKind) -> Result<Self> {
        Ok(ResonantCoeffs { a_bar: coeff_a(alpha)?, b_bar: coeff_b(alpha, model)?, model })
    }

    pub fn resonant(model: ModelKind) -> Self {
        Self::new(resonant_alpha(), model).expect("resonant alpha is in range")
    }
}
