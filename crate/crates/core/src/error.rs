//! Error types shared across the simulator.

use thiserror::Error;

/// Errors surfaced by scenario construction, channel synthesis, and the
/// optimization subsolvers.
#[derive(Debug, Error)]
pub enum SimError {
    /// Two points coincide where a direction or distance is required.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// A configuration value violates its documented constraint. The message
    /// names the offending key.
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    /// The requested initial trajectory cannot satisfy the per-slot speed
    /// limit.
    #[error("infeasible initialization: {0}")]
    InfeasibleInitialization(String),

    /// A phase vector entry is not unit-modulus.
    #[error("invalid phases: entry {index} has modulus {modulus}")]
    InvalidPhases { index: usize, modulus: f64 },

    /// Matrix dimensions do not match the link they represent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A solver produced a non-finite or structurally impossible value.
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    /// Retraction hit a zero-magnitude entry and cannot normalize.
    #[error("retraction singularity at entry {0}")]
    RetractionSingularity(usize),

    /// Config file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    pub fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::InvalidParameter {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
