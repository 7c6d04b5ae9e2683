use thiserror::Error;

/// Errors raised across the library.
///
/// The CLI maps [`Error::is_cap`] to exit code 3 and every other variant to
/// exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("field is inadmissible: {0}")]
    Inadmissible(String),

    #[error("{what} exceeds the enumeration cap ({limit})")]
    CapExceeded { what: String, limit: u64 },

    #[error("operands belong to different finite fields")]
    MixedFields,

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("curve is singular (discriminant vanishes)")]
    Singular,

    #[error("bad reduction at the requested prime")]
    BadReduction,
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn cap(what: impl Into<String>, limit: u64) -> Self {
        Error::CapExceeded {
            what: what.into(),
            limit,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
