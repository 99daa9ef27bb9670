//! Four satellites: the resonant inner triple plus an outer, nearly circular
//! fourth body ("Callisto"), its secular precession and the numerical check
//! that the intermediate orbit is surrounded by bounded, librating motion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::continuation::{newton_continue, PeriodicOrbitSeed, ShootingOptions};
use crate::charts::{cart_from_delaunay, elements_from_delaunay, CallistoState, CartState};
use crate::error::{Error, Result};
use crate::families::{resonant_circle, solve_equilibrium, Equilibrium, FamilyLabel};
use crate::flow::System;
use crate::frequency::{diophantine_check, libration_report, naff_frequencies, DiophantineParams, DiophantineResult, LibrationReport};
use crate::hamiltonian::{indirect_average_check, secular_callisto_coefficient, HamiltonianModel};
use crate::integrator::{integrate, linear_slope, Scheme};
use crate::mass::{MassConfig, ModelKind};

/// Kepler frequencies of bodies 3 and 4 must clear this margin at `|k| <= 10`.
pub const RESONANCE_GUARD: DiophantineParams = DiophantineParams { gamma: 1e-3, tau: 1.5, kmax: 10 };

/// Nodes per mean anomaly in the indirect-term average.
pub const HERMAN_NODES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiveBodyConfig {
    /// Four satellites; `mbar[3]` is the outer body.
    pub mc: MassConfig,
    /// Semi-major axis of the outermost inner satellite.
    pub a3: f64,
    pub a4: f64,
    /// Eccentricity bound of the separation condition.
    pub e_hat: f64,
}

impl FiveBodyConfig {
    pub fn new(mc: MassConfig, a3: f64, a4: f64, e_hat: f64) -> Result<Self> {
        let cfg = FiveBodyConfig { mc, a3, a4, e_hat };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Unit masses, `mu = 1e-6`, `a3 = 1`, `a4 = 2`.
    pub fn galilean(model: ModelKind) -> Self {
        FiveBodyConfig { mc: MassConfig { mbar: vec![1.0; 4], ..MassConfig::galilean(model) }, a3: 1.0, a4: 2.0, e_hat: 0.1 }
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        FiveBodyConfig { mc: self.mc.with_mu(mu), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        self.mc.validate()?;
        if self.mc.n() != 4 {
            return Err(Error::domain(format!("the five-body problem needs four satellites, got {}", self.mc.n())));
        }
        if !(0.0..1.0).contains(&self.e_hat) {
            return Err(Error::domain(format!("eccentricity bound must lie in [0, 1), got {}", self.e_hat)));
        }
        if !(self.a3 > 0.0 && self.a3 * (1.0 + self.e_hat) < self.a4 * (1.0 - self.e_hat)) {
            return Err(Error::domain(format!(
                "outer body not separated: a3 = {}, a4 = {}, e_hat = {}",
                self.a3, self.a4, self.e_hat
            )));
        }
        let check = diophantine_check(&self.kepler_pair(), &[], &RESONANCE_GUARD)?;
        if !check.pass {
            return Err(Error::domain(format!(
                "bodies 3 and 4 are near the resonance {:?} (margin {:.3e})",
                check.worst_k, check.margin
            )));
        }
        Ok(())
    }

    /// Unperturbed mean motions of bodies 3 and 4.
    pub fn kepler_pair(&self) -> [f64; 2] {
        [(self.mc.kepler_m(2) / self.a3.powi(3)).sqrt(), (self.mc.kepler_m(3) / self.a4.powi(3)).sqrt()]
    }

    /// Semi-major axes of the exact 4:2:1 chain followed by `a4`.
    pub fn semi_major_axes(&self) -> Result<[f64; 4]> {
        let c = resonant_circle(&self.mc.inner(), self.a3)?;
        Ok([c.a[0], c.a[1], c.a[2], self.a4])
    }
}

/// The four-satellite Hamiltonian; direct and indirect outer terms are part
/// of the same pairwise sums as the inner ones.
pub fn build_five_body(cfg: &FiveBodyConfig) -> Result<HamiltonianModel> {
    cfg.validate()?;
    Ok(HamiltonianModel::new(cfg.mc.clone()))
}

/// Energy of a state given in the fourth-body chart.
pub fn callisto_energy(model: &HamiltonianModel, cs: &CallistoState) -> Result<f64> {
    model.energy(&callisto_to_cart(cs, &model.mc)?)
}

pub fn callisto_to_cart(cs: &CallistoState, mc: &MassConfig) -> Result<CartState> {
    cart_from_delaunay(&cs.to_delaunay(), mc)
}

/// Inner equilibrium of `label` together with a circular outer orbit at
/// `lambda4 = 0`.
pub fn intermediate_orbit(cfg: &FiveBodyConfig, label: FamilyLabel, e2: f64) -> Result<CallistoState> {
    cfg.validate()?;
    let eq = match solve_equilibrium(label, &cfg.mc.inner(), e2, cfg.a3)? {
        Equilibrium::Feasible(eq) => eq,
        Equilibrium::Infeasible { reason, .. } => {
            return Err(Error::domain(format!("family {} infeasible: {reason}", label.compact())))
        }
    };
    let big_lambda4 = cfg.mc.kepler_mu(3) * (cfg.mc.kepler_m(3) * cfg.a4).sqrt();
    let mut inner = eq.state;
    inner.z[2] += big_lambda4;
    Ok(CallistoState { inner, big_lambda4, lambda4: 0.0, xi4: 0.0, eta4: 0.0 })
}

/// Intermediate orbit whose inner triple is the continued periodic orbit of
/// the three-satellite problem instead of the averaged equilibrium.
pub fn continued_intermediate(cfg: &FiveBodyConfig, label: FamilyLabel, e2: f64) -> Result<CallistoState> {
    let mut cs = intermediate_orbit(cfg, label, e2)?;
    let eq = solve_equilibrium(label, &cfg.mc.inner(), e2, cfg.a3)?
        .feasible()
        .ok_or_else(|| Error::domain("inner family infeasible"))?;
    let orbit = newton_continue(&PeriodicOrbitSeed::from_equilibrium(&eq)?, &ShootingOptions::default())?;
    cs.inner = orbit.reduced;
    cs.inner.z[2] += cs.big_lambda4;
    Ok(cs)
}

/// Weight of the quadratic secular term of the outer body.
pub fn callisto_kappa(cfg: &FiveBodyConfig) -> Result<f64> {
    secular_callisto_coefficient(&cfg.mc, cfg.semi_major_axes()?)
}

/// Prograde secular precession rate of the outer pericentre,
/// `mu sum_i mbar_i B1(a_i, a4) / (4 sqrt(M4 a4))`, from the circular-inner
/// average of the mutual potential to second order in `e4`.
pub fn callisto_normal_frequency(cfg: &FiveBodyConfig) -> Result<f64> {
    let a = cfg.semi_major_axes()?;
    let mut s = 0.0;
    for i in 0..3 {
        s += cfg.mc.mbar[i] * crate::laplace::coeff_b1(a[i], a[3])?;
    }
    Ok(cfg.mc.mu * s / (4.0 * (cfg.mc.kepler_m(3) * cfg.a4).sqrt()))
}

/// Largest averaged indirect coupling `<pbar_i . pbar_4>` on the intermediate orbit.
pub fn herman_residual(cfg: &FiveBodyConfig, cs: &CallistoState) -> Result<f64> {
    let els = elements_from_delaunay(&cs.to_delaunay(), &cfg.mc)?;
    indirect_average_check(&cfg.mc, &els, HERMAN_NODES)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusOptions {
    pub label: FamilyLabel,
    pub e2: f64,
    /// Initial outer eccentricity.
    pub e4: f64,
    /// Displacement of `delta1, delta2, eta1, eta2`.
    pub dbar: f64,
    /// Start the inner triple on its continued periodic orbit.
    pub continue_inner: bool,
    /// Horizon in periods of body 3.
    pub periods: usize,
    pub steps_per_period: usize,
    /// Samples for the frequency pair (one per step).
    pub naff_samples: usize,
    pub diophantine: DiophantineParams,
}

impl Default for TorusOptions {
    fn default() -> Self {
        TorusOptions {
            label: FamilyLabel::stable(),
            e2: 0.01,
            e4: 1e-3,
            dbar: 1e-3,
            continue_inner: true,
            periods: 10_000,
            steps_per_period: 128,
            naff_samples: 8192,
            diophantine: DiophantineParams { gamma: 1e-3, tau: 1.5, kmax: 20 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusReport {
    pub kappa: f64,
    pub callisto_freq: f64,
    /// Slope of the unwrapped, block-averaged outer pericentre.
    pub measured_g4_rate: f64,
    pub herman_residual: f64,
    pub e4_initial: f64,
    pub e4_min: f64,
    pub e4_max: f64,
    /// `e4` stayed within a factor 2 of its initial value.
    pub e4_band: bool,
    pub libration: LibrationReport,
    /// Mean motions of bodies 3 and 4 from the sampled positions.
    pub frequencies: [f64; 2],
    pub diophantine: DiophantineResult,
    pub max_rel_energy: f64,
}

/// Intermediate orbit with the outer eccentricity raised to `e4` (pericentre
/// aligned with body 3) and the inner angles shifted by `dbar`.
pub fn displaced_intermediate(cfg: &FiveBodyConfig, opts: &TorusOptions) -> Result<CartState> {
    let mut cs = if opts.continue_inner {
        continued_intermediate(cfg, opts.label, opts.e2)?
    } else {
        intermediate_orbit(cfg, opts.label, opts.e2)?
    };
    let e4 = opts.e4;
    if !(0.0..cfg.e_hat).contains(&e4) {
        return Err(Error::domain(format!("e4 = {e4} outside [0, {})", cfg.e_hat)));
    }
    let g4 = cs.big_lambda4 * (1.0 - e4 * e4).sqrt();
    cs.xi4 = (2.0 * (cs.big_lambda4 - g4)).sqrt();
    cs.inner.z[2] += g4 - cs.big_lambda4;
    for k in 0..2 {
        cs.inner.delta[k] += opts.dbar;
        cs.inner.eta[k] += opts.dbar;
    }
    callisto_to_cart(&cs, &cfg.mc)
}

pub fn verify_elliptic_2torus(cfg: &FiveBodyConfig, opts: &TorusOptions) -> Result<TorusReport> {
    let x0 = displaced_intermediate(cfg, opts)?;
    let period = std::f64::consts::TAU / cfg.kepler_pair()[0];
    let dt = period / opts.steps_per_period as f64;
    let traj = integrate(&x0, &cfg.mc, Scheme::WisdomHolman, dt, opts.periods * opts.steps_per_period, opts.steps_per_period)?;
    let libration = libration_report(&traj, opts.label)?;
    let e4: Vec<f64> = traj.means.iter().map(|m| m[3].e).collect();
    let g4: Vec<f64> = traj.means.iter().map(|m| m[3].g).collect();
    let tmid: Vec<f64> = (0..traj.len()).map(|k| traj.mean_time(k)).collect();
    let e4_min = e4.iter().cloned().fold(f64::INFINITY, f64::min);
    let e4_max = e4.iter().cloned().fold(0.0, f64::max);
    let e0 = opts.e4;
    let conservation = crate::integrator::conservation_report(&traj);

    let frequencies = position_frequencies(&x0, &cfg.mc, dt, opts.naff_samples)?;
    let diophantine = diophantine_check(&frequencies, &[], &opts.diophantine)?;
    let cs = intermediate_orbit(cfg, opts.label, opts.e2)?;
    Ok(TorusReport {
        kappa: callisto_kappa(cfg)?,
        callisto_freq: callisto_normal_frequency(cfg)?,
        measured_g4_rate: linear_slope(&tmid, &g4),
        herman_residual: herman_residual(cfg, &cs)?,
        e4_initial: e0,
        e4_min,
        e4_max,
        e4_band: e4_min >= 0.5 * e0 && e4_max <= 2.0 * e0,
        libration,
        frequencies,
        diophantine,
        max_rel_energy: conservation.max_rel_energy,
    })
}

/// Strongest lines of `q3` and `q4` seen as complex signals.
fn position_frequencies(x0: &CartState, mc: &MassConfig, dt: f64, samples: usize) -> Result<[f64; 2]> {
    let sys = System::new(mc);
    let mut x = x0.clone();
    let mut z3 = Vec::with_capacity(samples);
    let mut z4 = Vec::with_capacity(samples);
    for _ in 0..samples {
        z3.push(Complex64::new(x.q[2][0], x.q[2][1]));
        z4.push(Complex64::new(x.q[3][0], x.q[3][1]));
        sys.wh_step(&mut x, dt)?;
    }
    let top = |z: &[Complex64]| -> Result<f64> {
        naff_frequencies(z, dt, 1)?
            .lines
            .first()
            .map(|l| l.frequency)
            .ok_or_else(|| Error::convergence("frequency extraction", f64::NAN))
    };
    Ok([top(&z3)?, top(&z4)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intermediate_orbit_is_circular_outside() {
        let cfg = FiveBodyConfig::galilean(ModelKind::FixedCenter);
        let cs = intermediate_orbit(&cfg, FamilyLabel::stable(), 0.01).unwrap();
        assert_eq!((cs.xi4, cs.eta4), (0.0, 0.0));
        assert!(callisto_kappa(&cfg).unwrap() > 0.0);
        assert!(herman_residual(&cfg, &cs).unwrap() < 1e-10);
    }

    #[test]
    fn resonant_outer_body_rejected() {
        // a4 = 4^(1/3) puts body 4 at 2:1 with body 3
        let mut cfg = FiveBodyConfig::galilean(ModelKind::FixedCenter);
        cfg.a4 = 4f64.powf(1.0 / 3.0);
        assert!(cfg.validate().is_err());
    }
}
