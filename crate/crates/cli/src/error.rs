use thiserror::Error;

/// Errors in the configuration itself.
#[derive(Debug, Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("digest mismatch: {0}")]
    Digest(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run(_) => 1,
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Digest(_) => 4,
        }
    }
}

impl From<lfpp_core::Error> for CliError {
    fn from(e: lfpp_core::Error) -> Self {
        match e {
            lfpp_core::Error::Domain { .. } | lfpp_core::Error::Consistency { .. } => {
                CliError::Config(ConfigError(e.to_string()))
            }
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(format!("i/o: {e}"))
    }
}
