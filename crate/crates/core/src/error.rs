use std::path::PathBuf;

/// Errors raised by the lab's geometric, variational and I/O operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("operation not supported on this grid: {0}")]
    UnsupportedGrid(String),

    #[error("reflection leaves the grid: cell {cell} of fiber {node} would move to lattice index {target}")]
    ReflectionOutOfDomain { node: usize, cell: usize, target: i64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("shooting bracket not found: {0}")]
    BracketFailure(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
