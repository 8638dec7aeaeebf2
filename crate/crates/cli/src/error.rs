//! Command errors and their process exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] dht_core::Error),

    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 validation, 3 mode or precondition, 4 convergence, 5 resource, 1 output failure.
    pub fn exit_code(&self) -> i32 {
        use dht_core::Error as E;
        match self {
            CliError::Validation(_) | CliError::Read { .. } => 2,
            CliError::Write { .. } => 1,
            CliError::Core(e) => match e {
                E::WrongMode(_) | E::Precondition(_) | E::InfiniteDivergence { .. } | E::Infeasible(_) => 3,
                E::NoConvergence { .. } | E::Certificate(_) => 4,
                E::Resource(_) => 5,
                _ => 2,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
