use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Two grid values (grids, fields, bases, coefficients) do not live on
    /// the same grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A parameter is outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A request exceeds a configured size cap.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A numeric routine failed to converge or produced invalid output.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A relative quantity cannot be formed because the reference is zero.
    #[error("normalization error: {0}")]
    Normalization(String),

    /// Two tables being compared do not have congruent shapes.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An embedded data asset failed integrity or format checks.
    #[error("asset error: {0}")]
    Asset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
