//! Equations of motion of the rescaled Joviancentric system and the two
//! symplectic schemes built on them.
//!
//! * [`System::wh_step`]: Kepler drift + interaction kick + exact flow of the
//!   momentum coupling (second order, symmetric), for long runs.
//! * [`System::composition_step`]: kinetic/potential leapfrog raised to
//!   high order by triple-jump composition, with its tangent map, for shooting.

use nalgebra::DMatrix;

use crate::charts::CartState;
use crate::error::{Error, Result};
use crate::hamiltonian::R_MIN;
use crate::kepler::kepler_drift;
use crate::mass::{MassConfig, ModelKind};

/// Largest accepted ratio of interaction to Keplerian potential per body
/// in the Kepler-split scheme.
pub const MAX_PERTURBATION_RATIO: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct System {
    pub mc: MassConfig,
    pub n: usize,
    mu_i: Vec<f64>,
    m_big: Vec<f64>,
    /// `mu / m0` in the full problem, 0 otherwise.
    coupling: f64,
    /// `mu mbar_i mbar_j`, row-major `n x n`.
    pair: Vec<f64>,
}

impl System {
    pub fn new(mc: &MassConfig) -> Self {
        let n = mc.n();
        let mut pair = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    pair[i * n + j] = mc.mu * mc.mbar[i] * mc.mbar[j];
                }
            }
        }
        System {
            n,
            mu_i: (0..n).map(|i| mc.kepler_mu(i)).collect(),
            m_big: (0..n).map(|i| mc.kepler_m(i)).collect(),
            coupling: if mc.model == ModelKind::FullProblem { mc.mu / mc.m0 } else { 0.0 },
            pair,
            mc: mc.clone(),
        }
    }

    pub fn energy(&self, s: &CartState) -> f64 {
        let mut h = 0.0;
        for i in 0..self.n {
            let (q, p) = (s.q[i], s.p[i]);
            h += (p[0] * p[0] + p[1] * p[1]) / (2.0 * self.mu_i[i]) - self.mu_i[i] * self.m_big[i] / q[0].hypot(q[1]);
            for j in i + 1..self.n {
                let r = (q[0] - s.q[j][0]).hypot(q[1] - s.q[j][1]);
                h -= self.pair[i * self.n + j] / r;
                h += self.coupling * (p[0] * s.p[j][0] + p[1] * s.p[j][1]);
            }
        }
        h
    }

    /// `(dH/dq, dH/dp)` flattened as in [`CartState::to_vec`].
    pub fn gradient(&self, s: &CartState) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; 4 * n];
        let gv = self.grad_potential(&s.q, true);
        for i in 0..n {
            g[2 * i] = gv[i][0];
            g[2 * i + 1] = gv[i][1];
            let v = self.velocity(&s.p, i);
            g[2 * n + 2 * i] = v[0];
            g[2 * n + 2 * i + 1] = v[1];
        }
        g
    }

    /// Hamiltonian vector field `(dH/dp, -dH/dq)`.
    pub fn vector_field(&self, s: &CartState) -> Vec<f64> {
        let n = self.n;
        let g = self.gradient(s);
        let mut f = vec![0.0; 4 * n];
        for k in 0..2 * n {
            f[k] = g[2 * n + k];
            f[2 * n + k] = -g[k];
        }
        f
    }

    fn velocity(&self, p: &[[f64; 2]], i: usize) -> [f64; 2] {
        let mut v = [p[i][0] / self.mu_i[i], p[i][1] / self.mu_i[i]];
        if self.coupling != 0.0 {
            for (j, pj) in p.iter().enumerate() {
                if j != i {
                    v[0] += self.coupling * pj[0];
                    v[1] += self.coupling * pj[1];
                }
            }
        }
        v
    }

    /// Gradient of the potential; `central` adds the planet's attraction.
    fn grad_potential(&self, q: &[[f64; 2]], central: bool) -> Vec<[f64; 2]> {
        let n = self.n;
        let mut g = vec![[0.0; 2]; n];
        for i in 0..n {
            if central {
                let r = q[i][0].hypot(q[i][1]);
                let k = self.mu_i[i] * self.m_big[i] / (r * r * r);
                g[i][0] += k * q[i][0];
                g[i][1] += k * q[i][1];
            }
            for j in i + 1..n {
                let dx = q[i][0] - q[j][0];
                let dy = q[i][1] - q[j][1];
                let r = dx.hypot(dy);
                let k = self.pair[i * n + j] / (r * r * r);
                g[i][0] += k * dx;
                g[i][1] += k * dy;
                g[j][0] -= k * dx;
                g[j][1] -= k * dy;
            }
        }
        g
    }

    fn check_distances(&self, q: &[[f64; 2]]) -> Result<()> {
        for i in 0..self.n {
            let r = q[i][0].hypot(q[i][1]);
            if r < R_MIN {
                return Err(Error::Collision { i: 0, j: i + 1, r });
            }
            for j in i + 1..self.n {
                let r = (q[i][0] - q[j][0]).hypot(q[i][1] - q[j][1]);
                if r < R_MIN {
                    return Err(Error::Collision { i: i + 1, j: j + 1, r });
                }
            }
        }
        Ok(())
    }

    /// Hessian of the full potential, `2n x 2n`.
    fn hess_potential(&self, q: &[[f64; 2]]) -> DMatrix<f64> {
        let n = self.n;
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        let block = |k: f64, d: [f64; 2]| -> [[f64; 2]; 2] {
            let r2 = d[0] * d[0] + d[1] * d[1];
            let r = r2.sqrt();
            let a = k / (r2 * r);
            let b = 3.0 * k / (r2 * r2 * r);
            [[a - b * d[0] * d[0], -b * d[0] * d[1]], [-b * d[0] * d[1], a - b * d[1] * d[1]]]
        };
        for i in 0..n {
            let c = block(self.mu_i[i] * self.m_big[i], q[i]);
            for a in 0..2 {
                for b in 0..2 {
                    h[(2 * i + a, 2 * i + b)] += c[a][b];
                }
            }
            for j in i + 1..n {
                let p = block(self.pair[i * n + j], [q[i][0] - q[j][0], q[i][1] - q[j][1]]);
                for a in 0..2 {
                    for b in 0..2 {
                        h[(2 * i + a, 2 * i + b)] += p[a][b];
                        h[(2 * j + a, 2 * j + b)] += p[a][b];
                        h[(2 * i + a, 2 * j + b)] -= p[a][b];
                        h[(2 * j + a, 2 * i + b)] -= p[a][b];
                    }
                }
            }
        }
        h
    }

    /// Interaction-to-Kepler potential ratio, worst body.
    pub fn perturbation_ratio(&self, q: &[[f64; 2]]) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let kep = self.mu_i[i] * self.m_big[i] / q[i][0].hypot(q[i][1]);
            let mut inter = 0.0;
            for j in 0..n {
                if j != i {
                    inter += self.pair[i * n + j] / (q[i][0] - q[j][0]).hypot(q[i][1] - q[j][1]);
                }
            }
            worst = worst.max(inter / kep);
        }
        worst
    }

    fn kick(&self, s: &mut CartState, dt: f64) {
        let g = self.grad_potential(&s.q, false);
        for i in 0..self.n {
            s.p[i][0] -= dt * g[i][0];
            s.p[i][1] -= dt * g[i][1];
        }
    }

    /// Exact flow of `T1 = (mu/m0) sum_{i<j} pbar_i . pbar_j`.
    fn coupling_jump(&self, s: &mut CartState, dt: f64) {
        if self.coupling == 0.0 {
            return;
        }
        let tot = s.p.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
        for i in 0..self.n {
            s.q[i][0] += dt * self.coupling * (tot[0] - s.p[i][0]);
            s.q[i][1] += dt * self.coupling * (tot[1] - s.p[i][1]);
        }
    }

    fn kepler(&self, s: &mut CartState, dt: f64) -> Result<()> {
        for i in 0..self.n {
            let m = self.mu_i[i];
            let (q, v) = kepler_drift(s.q[i], [s.p[i][0] / m, s.p[i][1] / m], self.m_big[i], dt)?;
            s.q[i] = q;
            s.p[i] = [m * v[0], m * v[1]];
        }
        Ok(())
    }

    /// One symmetric Kepler-split step.
    pub fn wh_step(&self, s: &mut CartState, dt: f64) -> Result<()> {
        self.kick(s, 0.5 * dt);
        self.coupling_jump(s, 0.5 * dt);
        self.kepler(s, dt)?;
        self.coupling_jump(s, 0.5 * dt);
        self.kick(s, 0.5 * dt);
        self.check_distances(&s.q)?;
        let ratio = self.perturbation_ratio(&s.q);
        if ratio > MAX_PERTURBATION_RATIO {
            return Err(Error::StepReject(format!(
                "interaction/Kepler potential ratio {ratio:.3} exceeds {MAX_PERTURBATION_RATIO}"
            )));
        }
        Ok(())
    }

    fn drift(&self, s: &mut CartState, dt: f64) {
        let tot = s.p.iter().fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
        for i in 0..self.n {
            let m = self.mu_i[i];
            s.q[i][0] += dt * (s.p[i][0] / m + self.coupling * (tot[0] - s.p[i][0]));
            s.q[i][1] += dt * (s.p[i][1] / m + self.coupling * (tot[1] - s.p[i][1]));
        }
    }

    fn full_kick(&self, s: &mut CartState, dt: f64) {
        let g = self.grad_potential(&s.q, true);
        for i in 0..self.n {
            s.p[i][0] -= dt * g[i][0];
            s.p[i][1] -= dt * g[i][1];
        }
    }

    /// Tangent map of the drift: `dq += dt K dp` with `K = d^2 T / dp^2`.
    fn drift_tangent(&self, phi: &mut DMatrix<f64>, dt: f64) {
        let n = self.n;
        let cols = phi.ncols();
        for c in 0..cols {
            let tot = (0..n).fold([0.0, 0.0], |a, j| [a[0] + phi[(2 * n + 2 * j, c)], a[1] + phi[(2 * n + 2 * j + 1, c)]]);
            for i in 0..n {
                for a in 0..2 {
                    let dp = phi[(2 * n + 2 * i + a, c)];
                    phi[(2 * i + a, c)] += dt * (dp / self.mu_i[i] + self.coupling * (tot[a] - dp));
                }
            }
        }
    }

    fn kick_tangent(&self, q: &[[f64; 2]], phi: &mut DMatrix<f64>, dt: f64) {
        let n = self.n;
        let h = self.hess_potential(q);
        let dq = phi.rows(0, 2 * n).clone_owned();
        let upd = &h * dq;
        let mut dp = phi.rows_mut(2 * n, 2 * n);
        dp -= upd * dt;
    }

    /// One step of the composed kinetic/potential leapfrog, optionally with
    /// the tangent map applied to `phi` (`4n x k`).
    pub fn composition_step(&self, s: &mut CartState, dt: f64, scheme: &Composition, mut phi: Option<&mut DMatrix<f64>>) {
        for &w in &scheme.weights {
            let h = w * dt;
            self.drift(s, 0.5 * h);
            if let Some(p) = phi.as_deref_mut() {
                self.drift_tangent(p, 0.5 * h);
                self.kick_tangent(&s.q, p, h);
            }
            self.full_kick(s, h);
            self.drift(s, 0.5 * h);
            if let Some(p) = phi.as_deref_mut() {
                self.drift_tangent(p, 0.5 * h);
            }
        }
    }
}

/// Triple-jump composition of the second-order leapfrog.
#[derive(Clone, Debug, PartialEq)]
pub struct Composition {
    pub order: u32,
    pub weights: Vec<f64>,
}

impl Composition {
    /// `order` must be even and at least 2.
    pub fn new(order: u32) -> Result<Self> {
        if order < 2 || order % 2 != 0 {
            return Err(Error::domain(format!("composition order must be even and >= 2, got {order}")));
        }
        let mut weights = vec![1.0];
        let mut k = 2;
        while k < order {
            let p = 1.0 / (k as f64 + 1.0);
            let g1 = 1.0 / (2.0 - 2f64.powf(p));
            let g0 = 1.0 - 2.0 * g1;
            let mut next = Vec::with_capacity(3 * weights.len());
            for g in [g1, g0, g1] {
                next.extend(weights.iter().map(|w| w * g));
            }
            weights = next;
            k += 2;
        }
        Ok(Composition { order, weights })
    }
}
