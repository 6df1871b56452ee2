use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("oracle budget exceeded: {0}")]
    Budget(String),
    #[error("certification failed: {0}")]
    Certification(String),
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Budget(_) => 5,
            CliError::Certification(_) => 6,
        }
    }
}

impl From<qchan::Error> for CliError {
    fn from(err: qchan::Error) -> Self {
        use qchan::Error as E;
        match err {
            E::NoSignChange { .. } => CliError::Solver(err.to_string()),
            E::BudgetExceeded { .. } => CliError::Budget(err.to_string()),
            E::Domain { .. }
            | E::InvalidState(_)
            | E::InvalidEnsemble(_)
            | E::Completeness(_)
            | E::Unsupported(_)
            | E::InvalidConfig(_) => CliError::Invalid(err.to_string()),
        }
    }
}
