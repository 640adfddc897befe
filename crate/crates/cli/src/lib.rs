//! Experiment runner behind the `coslaw` binary.
//!
//! A command reads an [`ExperimentConfig`], computes, and returns an
//! [`Outcome`]: a deterministic payload (CSV or JSON lines) plus a short
//! human-readable summary for the diagnostic stream.

pub mod commands;
pub mod config;
pub mod format;

use coslaw_core::CoslawError;
use thiserror::Error;

pub use commands::{run, Command, Outcome};
pub use config::{ExperimentConfig, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoslawError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 config, 3 domain or precondition, 4 overflow, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io(_) => 1,
            Self::Core(e) => match e {
                CoslawError::ConfigError(_) | CoslawError::InvalidMatrix(_) | CoslawError::DimensionMismatch { .. } => 2,
                CoslawError::DomainError(_)
                | CoslawError::OutsideDisk { .. }
                | CoslawError::NotNormal { .. }
                | CoslawError::SeriesBudget(_) => 3,
                CoslawError::Overflowed { .. } => 4,
                CoslawError::NoConvergence(_) => 1,
            },
        }
    }
}
