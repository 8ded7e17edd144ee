use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The integrated state left the set of density matrices.
    #[error("integration diverged at t = {t}: max violation {max_violation:e}")]
    IntegrationDiverged { t: f64, max_violation: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A sweep failure, tagged with the grid point that produced it.
    #[error("at grid point (delta = {delta}, t = {t}): {source}")]
    AtGridPoint {
        delta: f64,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::IntegrationDiverged { .. } | Error::NumericalFailure(_) => true,
            Error::AtGridPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
