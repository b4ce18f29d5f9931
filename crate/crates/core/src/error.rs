use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The Gram form at `level` has a negative direction, so no orthonormal
    /// basis exists.
    #[error("non-unitary lowest-weight data (c = {c}, h = {h}): Gram form is indefinite at level {level}")]
    NonUnitary { c: String, h: String, level: usize },

    #[error("tensor product dimension {dim} at level {level} exceeds the cap {cap}")]
    DimensionCap { level: usize, dim: usize, cap: usize },

    #[error("quadrature did not converge: achieved error estimate {achieved:e} > requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("eigendecomposition of the level-{level} Gram matrix produced non-finite values")]
    Eigen { level: usize },

    #[error("malformed {what} at line {line}: {detail}")]
    Format {
        what: &'static str,
        line: usize,
        detail: String,
    },

    #[error("field is not real: coefficient(-n) != conj(coefficient(n)) for n in {offending:?}")]
    NotReal { offending: Vec<i64> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
