//! Experiment harness library behind the `mlstc` binary: configuration,
//! rate-distortion sweeps, and report emission.

pub mod config;
pub mod report;
pub mod sweep;

/// Harness-level errors, classified for process exit codes:
/// configuration problems exit 2, data problems 3, numerical problems 4.
#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Lib(#[from] mlstc::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Lib(e) => match e {
                mlstc::Error::Domain(_) | mlstc::Error::InfeasibleRate(_) => 2,
                mlstc::Error::Io { .. }
                | mlstc::Error::Format { .. }
                | mlstc::Error::ShapeMismatch(_)
                | mlstc::Error::InsufficientData(_)
                | mlstc::Error::DegenerateData(_) => 3,
                mlstc::Error::Numerical(_) | mlstc::Error::Singular(_) => 4,
            },
        }
    }
}
