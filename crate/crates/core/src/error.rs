use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("strategy {pi} outside the domain {domain}")]
    Domain { pi: f64, domain: String },

    #[error("no maximizer: {0}")]
    Unbounded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(pi: f64, domain: impl Into<String>) -> Self {
        Error::Domain {
            pi,
            domain: domain.into(),
        }
    }

    /// True for failures caused by the model or its configuration rather
    /// than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidModel(_) | Error::Config(_))
    }
}
