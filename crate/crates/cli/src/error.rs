use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{}: matrix is {rows}x{cols}, expected square", path.display())]
    NotSquare { path: PathBuf, rows: usize, cols: usize },
    #[error("invalid argument: {0}")]
    Args(String),
    #[error(transparent)]
    Solver(#[from] seplam_core::Error),
}
