use thiserror::Error;

/// Errors raised by graph, matrix and certificate operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("vertex count {0} exceeds the limit of 64")]
    TooManyVertices(usize),

    #[error("graph is not a tournament: pair ({0},{1}) has no arc")]
    NotTournament(usize, usize),

    #[error("matrix is not symmetric at ({0},{1})")]
    Asymmetric(usize, usize),

    #[error("matrix is singular")]
    Singular,

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("{0} exceeds the supported size")]
    SizeLimit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(token: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Parse {
        token: token.into(),
        reason: reason.into(),
    }
}
