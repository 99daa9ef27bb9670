//! Long runs of the full models with on-the-fly block averaging.
//!
//! Each sample covers `stride` steps: the osculating elements are averaged
//! over the block (angles unwrapped step by step first), which removes the
//! short-period terms when a block spans one period of the outer body of
//! the resonant chain. Energy and angular momentum are recorded at block ends.

use serde::Serialize;

use crate::angles::wrap;
use crate::charts::CartState;
use crate::elements::cartesian_to_elements;
use crate::error::{Error, Result};
use crate::flow::{Composition, System};
use crate::mass::{MassConfig, ModelKind};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Scheme {
    /// Kepler drift plus interaction kicks, second order.
    WisdomHolman,
    /// Kinetic/potential leapfrog composed to the given even order.
    Composition(u32),
}

/// Block-averaged osculating elements of one body; `l` and `g` are unwrapped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MeanElements {
    pub a: f64,
    pub e: f64,
    pub l: f64,
    pub g: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub model: ModelKind,
    pub scheme: Scheme,
    pub dt: f64,
    pub stride: usize,
    /// Period of the reference body (third satellite) at the start.
    pub period: f64,
    /// Block end times.
    pub times: Vec<f64>,
    /// Block-averaged elements, one vector of bodies per block.
    pub means: Vec<Vec<MeanElements>>,
    pub energy: Vec<f64>,
    pub momentum: Vec<f64>,
    pub initial_energy: f64,
    pub initial_momentum: f64,
    #[serde(skip)]
    pub final_state: CartState,
}

impl Trajectory {
    /// Centre time of block `k`.
    pub fn mean_time(&self, k: usize) -> f64 {
        self.times[k] - 0.5 * self.stride as f64 * self.dt
    }

    pub fn sample_step(&self) -> f64 {
        self.stride as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Series of one combination `sum c_i l_i + sum d_i g_i` of mean angles.
    pub fn angle_series(&self, cl: &[f64], cg: &[f64]) -> Vec<f64> {
        self.means
            .iter()
            .map(|m| m.iter().enumerate().map(|(i, b)| cl.get(i).unwrap_or(&0.0) * b.l + cg.get(i).unwrap_or(&0.0) * b.g).sum())
            .collect()
    }
}

/// Reference period `2 pi / n` of the third satellite (or the outermost
/// one when fewer are present).
pub fn reference_period(state: &CartState, mc: &MassConfig) -> Result<f64> {
    let body = (mc.n() - 1).min(2);
    let el = cartesian_to_elements(state.q[body], state.p[body], mc, body)?.elements;
    Ok(std::f64::consts::TAU * (el.a.powi(3) / mc.kepler_m(body)).sqrt())
}

/// Integrates `nsteps` fixed steps, sampling every `stride` steps.
pub fn integrate(initial: &CartState, mc: &MassConfig, scheme: Scheme, dt: f64, nsteps: usize, stride: usize) -> Result<Trajectory> {
    mc.validate()?;
    if initial.n() != mc.n() {
        return Err(Error::domain(format!("state has {} bodies, configuration {}", initial.n(), mc.n())));
    }
    if stride == 0 || nsteps % stride != 0 {
        return Err(Error::domain(format!("nsteps ({nsteps}) must be a positive multiple of stride ({stride})")));
    }
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::domain("time step must be finite and non-zero"));
    }
    let sys = System::new(mc);
    let comp = match &scheme {
        Scheme::Composition(order) => Some(Composition::new(*order)?),
        Scheme::WisdomHolman => None,
    };
    let n = mc.n();
    let elements = |s: &CartState| -> Result<Vec<[f64; 4]>> {
        (0..n)
            .map(|i| {
                let c = cartesian_to_elements(s.q[i], s.p[i], mc, i)?;
                Ok([c.elements.a, c.elements.e, c.elements.l, c.elements.g])
            })
            .collect()
    };
    let mut x = initial.clone();
    let mut last = elements(&x)?;
    let mut unwrapped: Vec<[f64; 2]> = last.iter().map(|e| [e[2], e[3]]).collect();
    let nblocks = nsteps / stride;
    let mut traj = Trajectory {
        model: mc.model,
        scheme: scheme.clone(),
        dt,
        stride,
        period: reference_period(initial, mc)?,
        times: Vec::with_capacity(nblocks),
        means: Vec::with_capacity(nblocks),
        energy: Vec::with_capacity(nblocks),
        momentum: Vec::with_capacity(nblocks),
        initial_energy: sys.energy(initial),
        initial_momentum: initial.angular_momentum(),
        final_state: initial.clone(),
    };
    for block in 0..nblocks {
        let mut acc = vec![MeanElements::default(); n];
        for _ in 0..stride {
            match &comp {
                Some(c) => sys.composition_step(&mut x, dt, c, None),
                None => sys.wh_step(&mut x, dt)?,
            }
            let now = elements(&x)?;
            for i in 0..n {
                unwrapped[i][0] += wrap(now[i][2] - last[i][2]);
                unwrapped[i][1] += wrap(now[i][3] - last[i][3]);
                acc[i].a += now[i][0];
                acc[i].e += now[i][1];
                acc[i].l += unwrapped[i][0];
                acc[i].g += unwrapped[i][1];
            }
            last = now;
        }
        let w = 1.0 / stride as f64;
        for m in &mut acc {
            m.a *= w;
            m.e *= w;
            m.l *= w;
            m.g *= w;
        }
        traj.times.push((block + 1) as f64 * stride as f64 * dt);
        traj.means.push(acc);
        traj.energy.push(sys.energy(&x));
        traj.momentum.push(x.angular_momentum());
    }
    traj.final_state = x;
    Ok(traj)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    /// Relative energy deviation per sample.
    pub rel_energy: Vec<f64>,
    /// Relative angular-momentum deviation per sample.
    pub rel_momentum: Vec<f64>,
    pub max_rel_energy: f64,
    pub max_rel_momentum: f64,
    /// Least-squares slope of the relative energy error per reference period.
    pub energy_trend: f64,
    pub momentum_trend: f64,
}

/// Least-squares slope of `y` against `x`.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub fn conservation_report(traj: &Trajectory) -> ConservationReport {
    let e0 = traj.initial_energy;
    let c0 = traj.initial_momentum;
    let rel_energy: Vec<f64> = traj.energy.iter().map(|e| (e - e0) / e0.abs()).collect();
    let rel_momentum: Vec<f64> = traj.momentum.iter().map(|c| (c - c0) / c0.abs()).collect();
    let periods: Vec<f64> = traj.times.iter().map(|t| t / traj.period).collect();
    let maxabs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    ConservationReport {
        max_rel_energy: maxabs(&rel_energy),
        max_rel_momentum: maxabs(&rel_momentum),
        energy_trend: linear_slope(&periods, &rel_energy),
        momentum_trend: linear_slope(&periods, &rel_momentum),
        rel_energy,
        rel_momentum,
    }
}
