use thiserror::Error;

use crate::oracle::OracleError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// The subset recursion was asked to handle more records than allowed.
    #[error("database has {n} records, above the limit of {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error(transparent)]
    Oracle(#[from] OracleError),

    /// A memo lookup needed a subset that was never stored.
    #[error("memo table has no entry for subset {subset:#x}")]
    MissingEntry { subset: u64 },

    /// Something that cannot happen for valid inputs did happen.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("duplicate individual id `{0}`")]
    DuplicateId(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
