//! Error type shared by every module.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the physically meaningful range.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed input such as a wrong shape or an out-of-range index.
    #[error("input error: {0}")]
    Input(String),
    /// A symplectic eigenvalue fell below the vacuum bound.
    #[error("unphysical state: symplectic eigenvalue #{index} = {value}")]
    Physicality { index: usize, value: f64 },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("insufficient samples: need at least {required}, got {got}")]
    InsufficientSamples { required: usize, got: usize },
    #[error("phase recovery failed: {0}")]
    RecoveryFailure(String),
    /// Every offending field found while validating a configuration.
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),
}

pub type Result<T> = core::result::Result<T, Error>;
