use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of a closed-form expression.
    #[error("domain error: {0}")]
    Domain(String),

    /// A problem description violates one of its invariants.
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("no blow-up detected within t <= {horizon}")]
    NoBlowup { horizon: f64 },

    #[error("step size collapsed to {step:e} at t = {t} before reaching F = {level:e}")]
    StepCollapse { t: f64, step: f64, level: f64 },

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
