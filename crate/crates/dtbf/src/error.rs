use thiserror::Error;

/// Failure of a CLI run, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid input: config, trace or parameters.
    #[error("{0}")]
    Input(String),
    /// No design point satisfies the requirement.
    #[error("{0}")]
    Infeasible(String),
    /// Results could not be written.
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Infeasible(_) => 3,
            Self::Output(_) => 1,
        }
    }

    pub(crate) fn field(field: &str, err: impl std::fmt::Display) -> Self {
        Self::Input(format!("{field}: {err}"))
    }
}

impl From<dtbf_core::Error> for CliError {
    fn from(e: dtbf_core::Error) -> Self {
        Self::Input(e.to_string())
    }
}
