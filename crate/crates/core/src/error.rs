use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine could not reach its accuracy target (term cap,
    /// quadrature non-convergence, ill-conditioning).
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// Inputs with mismatched or unsupported sizes.
    #[error("size error: {0}")]
    Size(String),

    /// The scalar function is not defined on the spectrum of the matrix.
    #[error("spectral-domain error: {0}")]
    SpectralDomain(String),

    /// Evaluation point beyond the simulated horizon.
    #[error("time {t} is beyond the simulated horizon {horizon}")]
    OutOfRange { t: f64, horizon: f64 },

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
