use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Schur complement block D[{block}] is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsdBlock { block: usize, min_eigenvalue: f64 },

    #[error(
        "off-diagonal block ({row}, {col}) leaves the range of D[{col}] (residual {residual:e})"
    )]
    RangeViolation {
        row: usize,
        col: usize,
        residual: f64,
    },

    #[error("map is not completely positive: {0}")]
    NotCp(String),

    #[error("operator is not an isometry (|V*V - I| = {residual:e})")]
    NotIsometry { residual: f64 },

    #[error("block matrix is not unit lower triangular at block ({row}, {col})")]
    NotUniTriangular { row: usize, col: usize },

    #[error("dilation unitary failed verification (residual {residual:e})")]
    UnitarityFailure { residual: f64 },

    #[error("eigensolver did not converge")]
    NumericalFailure,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Kraus operators have inconsistent shapes: {0}")]
    ShapeMismatch(String),

    #[error("empty Kraus list")]
    EmptyKrausList,

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("parse error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
