use thiserror::Error;

/// Errors raised by the numerical kernels, samplers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("numeric failure in {kernel}: {detail}")]
    Numeric { kernel: &'static str, detail: String },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("rate fit unavailable: {admissible} admissible rows (need at least 3)")]
    FitUnavailable { admissible: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn insufficient(msg: impl Into<String>) -> Self {
        Error::InsufficientData(msg.into())
    }

    /// Process exit code used by the CLI: 2 for configuration problems,
    /// 3 for numeric-kernel failures. Check failures (code 1) are not errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Unsupported(_) | Error::Io(_) => 2,
            Error::InsufficientData(_) => 2,
            Error::Numeric { .. } | Error::FitUnavailable { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
