//! Scenario-driven experiments on thermal-state CV-QKD access networks.

pub mod architecture;
pub mod commands;
pub mod output;
pub mod runner;
pub mod scenario;

/// Failure of a command, mapped to the process exit status.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Numerical(_) => exit::NUMERICAL,
            CliError::Io(_) => exit::IO,
        }
    }
}

impl From<cvqan_core::Error> for CliError {
    fn from(e: cvqan_core::Error) -> Self {
        use cvqan_core::Error as E;
        match e {
            E::Validation(v) => CliError::Validation(v),
            E::Domain(_) | E::Input(_) | E::Configuration(_) => CliError::Validation(vec![e.to_string()]),
            E::Physicality { .. } | E::Numerical(_) | E::InsufficientSamples { .. } | E::RecoveryFailure(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    /// The run completed but some network has zero key or a check did not pass.
    pub const INCOMPLETE: i32 = 4;
}
