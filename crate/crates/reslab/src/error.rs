use thiserror::Error;

/// Every failure the library can report. The CLI maps these to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unbounded two-body orbit (energy {energy:e}) for body {body}")]
    Hyperbolic { body: usize, energy: f64 },
    #[error("collision: r_{i}{j} = {r:e} below r_min")]
    Collision { i: usize, j: usize, r: f64 },
    #[error("no convergence in {what} (last residual {residual:e})")]
    Convergence { what: String, residual: f64 },
    #[error("singular denominator: {0}")]
    SingularDenominator(String),
    #[error("degenerate shooting system: {0}")]
    Degeneracy(String),
    #[error("no return to the section within {0} time units")]
    NoReturn(f64),
    #[error("step rejected: {0}")]
    StepReject(String),
    #[error("lines at {f1} and {f2} closer than the window resolution {min_sep}")]
    Resolution { f1: f64, f2: f64, min_sep: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("missing artifact: {0}")]
    MissingArtifact(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status: 1 for configuration problems, 3 for solver
    /// convergence failures, 2 for every other domain failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Io(_) | Error::MissingArtifact(_) => 1,
            Error::Convergence { .. } | Error::Degeneracy(_) | Error::NoReturn(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(what: impl Into<String>, residual: f64) -> Self {
        Error::Convergence { what: what.into(), residual }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
