use thiserror::Error;

/// Errors raised by the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("coding failure: {0}")]
    Coding(String),
    /// A pipeline hypothesis did not hold; `stage` names it.
    #[error("stage `{stage}` failed: {reason}")]
    Stage { stage: String, reason: String },
    #[error("precondition unmet: {0}")]
    Precondition(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn stage(stage: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
