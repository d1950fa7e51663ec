use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("scale error: {0}")]
    Scale(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("admissibility error: {0} violated")]
    Admissibility(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) | Error::Scale(_) | Error::Construction(_) => 2,
            Error::Admissibility(_) => 3,
            Error::Budget(_) => 4,
            Error::Invariant(_) => 5,
        }
    }
}
