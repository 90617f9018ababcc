use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular value decomposition failed to converge ({dim}x{dim} matrix)")]
    Svd { dim: usize },

    #[error("eigenvalue computation failed to converge ({dim}x{dim} matrix)")]
    Eigen { dim: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix must be nonempty")]
    Empty,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// An internal consistency check failed, e.g. the certificate reached the
    /// gap branch without crossings for one of the matrices.
    #[error("internal logic error: {0}")]
    Logic(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
