//! Resonant normal forms, collinear periodic-orbit families and libration
//! diagnostics for three or four satellites locked in the 4:2:1 Laplace
//! resonance around a central planet.
//!
//! Units: `G = 1`, central mass `m0` (default 1). Satellite masses are
//! `mu * mbar_i` and every Hamiltonian is divided by `mu`.

pub mod angles;
pub mod charts;
pub mod cli;
pub mod continuation;
pub mod elements;
pub mod families;
pub mod five_body;
pub mod flow;
pub mod frequency;
pub mod error;
pub mod hamiltonian;
pub mod integrator;
pub mod kepler;
pub mod laplace;
pub mod mass;

pub use error::{Error, Result};
pub use mass::{MassConfig, ModelKind};
