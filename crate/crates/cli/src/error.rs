use thiserror::Error;

/// Failure of a CLI command, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("scenario `{scenario}`: {source}")]
    Numeric {
        scenario: String,
        #[source]
        source: kpp_core::Error,
    },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0} check(s) failed")]
    Checks(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } | CliError::Io(_) => 3,
            CliError::Checks(_) => 4,
        }
    }

    pub(crate) fn numeric(scenario: &str, source: kpp_core::Error) -> Self {
        CliError::Numeric {
            scenario: scenario.to_string(),
            source,
        }
    }
}
