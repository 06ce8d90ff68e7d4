use thiserror::Error;

/// Errors raised while constructing or decomposing operators.
///
/// Verification failures are never errors; they are reported through
/// [`RelationResidual`](crate::algebra::RelationResidual) records.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch in {op}: {left} vs {right}")]
    Shape {
        op: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension {requested} exceeds the configured maximum {max}")]
    Size { requested: usize, max: usize },

    #[error("matrix is singular within tolerance (smallest singular value {smallest_singular_value:e})")]
    Singular { smallest_singular_value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("index {index} out of range 0..={max}")]
    Range { index: usize, max: usize },

    #[error("structure error: {0}")]
    Structure(String),

    /// The phermion relations cannot be realized with the requested metric.
    #[error("algebra obstruction: {0}")]
    AlgebraObstruction(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
