use thiserror::Error;

/// Errors raised by the flagcode library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands live over different fields.
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    #[error("division by zero")]
    DivisionByZero,

    /// A field description was rejected (non-prime characteristic, reducible modulus, ...).
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// Shapes, indices or dimensions do not fit together.
    #[error("domain error: {0}")]
    Domain(String),

    /// A subspace or tuple of subspaces is outside the big cell.
    #[error("not in the big cell: {0}")]
    Cell(String),

    /// An enumeration would visit more elements than the configured budget allows.
    #[error("enumeration budget exceeded: {required} elements required, limit is {limit}")]
    Budget { required: u128, limit: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
