use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The query's family dimension is not what the operation needs
    /// (0 for counts, 1 for genus queries).
    #[error("dimension mismatch: excess = {excess}")]
    DimensionMismatch { excess: i64 },

    /// An internal identity that must hold exactly was violated.
    #[error("consistency violation: {0}")]
    Consistency(String),

    #[error("no valid thickening: {0}")]
    NoThickening(String),

    #[error("empty family: condition codimension {codim} exceeds ambient dimension {n}")]
    EmptyFamily { codim: u32, n: u32 },

    #[error("outside supported envelope: {0}")]
    OutsideEnvelope(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
