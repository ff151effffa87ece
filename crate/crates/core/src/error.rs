use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {dim} exceeds the configured maximum {max}")]
    Sizing { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The eigensolver hit its iteration cap. `index` is the first eigenvalue
    /// index that failed when the backend reports it.
    #[error("eigensolver did not converge (dimension {dim}{})", .index.map(|i| format!(", index {i}")).unwrap_or_default())]
    NoConvergence { dim: usize, index: Option<usize> },

    #[error(
        "truncation n_fock={n_fock} is insufficient; at least {required} Fock levels are required"
    )]
    TruncationInsufficient { n_fock: usize, required: usize },

    #[error("lowest levels did not converge below the truncation cap {cap}: last drift {drift:e}")]
    TruncationNotConverged { cap: usize, drift: f64 },

    #[error("transform identity `{identity}` failed: residual {residual:e} exceeds {threshold:e}")]
    TransformMismatch {
        identity: String,
        residual: f64,
        threshold: f64,
    },

    #[error("Boltzmann tail weight {tail:e} is not negligible; increase beta or k")]
    InvalidBeta { tail: f64 },

    #[error("configuration: {0}")]
    Config(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
