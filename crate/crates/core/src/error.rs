use thiserror::Error;

use crate::lp::LpError;

/// Errors raised while building samples, resolving configuration or scoring DMUs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KamError {
    #[error("invalid DMU `{id}`: {reason}")]
    InvalidDmu { id: String, reason: String },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("epsilon configuration makes the program infeasible for DMU `{dmu}`")]
    Infeasible { dmu: String },

    #[error("linear program for DMU `{dmu}` is unbounded")]
    Unbounded { dmu: String },

    #[error("solver failure for DMU `{dmu}`: {source}")]
    Solver {
        dmu: String,
        #[source]
        source: LpError,
    },

    #[error("fractional iteration for DMU `{dmu}` did not converge after {iterations} iterations (last gap {gap:e})")]
    NotConverged {
        dmu: String,
        iterations: usize,
        gap: f64,
    },

    #[error("degenerate score for DMU `{dmu}`: {reason}")]
    DegenerateScore { dmu: String, reason: String },

    #[error("scenario generation failed: {0}")]
    Generation(String),
}

/// Coarse grouping used by front ends to map errors onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    Config,
    Solver,
}

impl KamError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            KamError::InvalidDmu { .. } | KamError::InvalidSample(_) => ErrorCategory::Input,
            KamError::Config(_) | KamError::Infeasible { .. } | KamError::Generation(_) => {
                ErrorCategory::Config
            }
            KamError::Unbounded { .. }
            | KamError::Solver { .. }
            | KamError::NotConverged { .. }
            | KamError::DegenerateScore { .. } => ErrorCategory::Solver,
        }
    }
}

pub type Result<T> = std::result::Result<T, KamError>;
