use std::path::PathBuf;

use thiserror::Error;

use crate::data::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The FTRL exponent `eta * ||g_sum||` left the range where `exp` is finite.
    #[error("iterate overflow{}: exponent {exponent} exceeds {limit}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    Overflow {
        step: Option<u64>,
        exponent: f64,
        limit: f64,
    },

    /// A baseline produced a non-finite iterate.
    #[error("{algorithm} diverged at step {step}")]
    Diverged { algorithm: String, step: u64 },

    #[error("no horizon up to {cap} satisfies the adversary conditions (c={c}, k={k}, eps={eps})")]
    Infeasible { c: f64, k: f64, eps: f64, cap: u64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("sweep failed: {0}")]
    Sweep(String),

    #[error("aggregation failed: {0}")]
    Aggregate(String),
}

impl Error {
    /// Short stable identifier, used for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Overflow { .. } => "overflow",
            Error::Diverged { .. } => "diverged",
            Error::Infeasible { .. } => "infeasible",
            Error::Parse(_) => "parse",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Sweep(_) => "sweep",
            Error::Aggregate(_) => "aggregate",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
