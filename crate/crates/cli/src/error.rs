use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] paramarkov::Error),

    #[error("{0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// One or more checks exceeded their tolerance.
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(paramarkov::Error::Accuracy(_)) => 4,
            CliError::Verification(_) => 3,
            _ => 2,
        }
    }
}
