use thiserror::Error;

/// Errors raised by the numerical kernels and law checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoslawError {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not normal (commutator norm {commutator:e})")]
    NotNormal { commutator: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    /// A produced magnitude went past the overflow cap.
    #[error("overflow: magnitude exceeded {cap:e}")]
    Overflowed { cap: f64 },

    #[error("outside accuracy domain: {0}")]
    DomainError(String),

    #[error("OutsideDisk: norm {norm} exceeds {limit}")]
    OutsideDisk { norm: f64, limit: f64 },

    #[error("series needed more than {0} terms")]
    SeriesBudget(usize),

    #[error("config error: {0}")]
    ConfigError(String),
}

pub type Result<T> = std::result::Result<T, CoslawError>;
