//! Mass parameters and the two Kepler normalizations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which splitting of the Hamiltonian is used.
///
/// `FixedCenter` keeps the planet fixed (no indirect part). `FullProblem` is the
/// free 1+n body problem in canonical Joviancentric coordinates, whose kinetic
/// energy carries the momentum coupling `T1 = sum p_i . p_j / m0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "fixed", alias = "FixedCenter")]
    FixedCenter,
    #[serde(rename = "full", alias = "FullProblem")]
    FullProblem,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::FixedCenter => "fixed",
            ModelKind::FullProblem => "full",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" | "FixedCenter" => Ok(ModelKind::FixedCenter),
            "full" | "FullProblem" => Ok(ModelKind::FullProblem),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

/// Central mass, rescaled satellite masses and the small parameter.
///
/// Physical satellite masses are `m_i = mu * mbar_i`. All Hamiltonians in this
/// crate are divided by `mu` and use momenta `pbar = ptilde / mu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassConfig {
    pub m0: f64,
    pub mbar: Vec<f64>,
    pub mu: f64,
    pub model: ModelKind,
}

impl MassConfig {
    pub fn new(m0: f64, mbar: Vec<f64>, mu: f64, model: ModelKind) -> Result<Self> {
        let mc = MassConfig { m0, mbar, mu, model };
        mc.validate()?;
        Ok(mc)
    }

    /// Idealized Galilean triple: unit masses, `mu = 1e-6`.
    pub fn galilean(model: ModelKind) -> Self {
        MassConfig { m0: 1.0, mbar: vec![1.0; 3], mu: 1e-6, model }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m0 > 0.0 && self.m0.is_finite()) {
            return Err(Error::domain(format!("central mass must be positive, got {}", self.m0)));
        }
        if self.mbar.is_empty() || self.mbar.len() > 4 {
            return Err(Error::domain(format!("expected 1 to 4 satellites, got {}", self.mbar.len())));
        }
        if self.mbar.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
            return Err(Error::domain("rescaled masses must be finite and non-negative"));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::domain(format!("mu must be non-negative, got {}", self.mu)));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.mbar.len()
    }

    /// Physical mass `mu * mbar_i`.
    pub fn mass(&self, i: usize) -> f64 {
        self.mu * self.mbar[i]
    }

    /// Reduced Kepler mass `mu_i`.
    pub fn kepler_mu(&self, i: usize) -> f64 {
        match self.model {
            ModelKind::FixedCenter => self.mbar[i],
            ModelKind::FullProblem => self.m0 * self.mbar[i] / (self.m0 + self.mu * self.mbar[i]),
        }
    }

    /// Attracting mass `M_i` of the Kepler problem of body `i`.
    pub fn kepler_m(&self, i: usize) -> f64 {
        match self.model {
            ModelKind::FixedCenter => self.m0,
            ModelKind::FullProblem => self.m0 + self.mu * self.mbar[i],
        }
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        MassConfig { mu, ..self.clone() }
    }

    pub fn with_model(&self, model: ModelKind) -> Self {
        MassConfig { model, ..self.clone() }
    }

    /// The first three satellites only.
    pub fn inner(&self) -> Self {
        MassConfig { mbar: self.mbar[..self.n().min(3)].to_vec(), ..self.clone() }
    }
}
