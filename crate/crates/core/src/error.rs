use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The variants follow the error classes used throughout: shape/field
/// mismatches are structural, invalid values are domain errors, and
/// impossible or unsupported parameter choices get their own kinds.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
