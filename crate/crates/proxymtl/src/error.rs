use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A reference covariance has an eigenvalue below the PSD rejection threshold (-1e-8).
    #[error("covariance is not positive semidefinite: min eigenvalue {0:.3e}")]
    NotPsd(f64),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("parse error in {path}: {msg}")]
    ParseError { path: PathBuf, msg: String },

    #[error("missing file: {0} (referenced by the bundle manifest or CLI arguments)")]
    MissingFile(PathBuf),

    #[error("negative threshold: {0}")]
    NegativeThreshold(f64),

    #[error("SVD failed: {0}")]
    SvdFailure(String),

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("empty lambda grid")]
    EmptyGrid,

    /// Invalid generator or scenario parameters (sparsity/rank out of range, bad overlap
    /// fraction, unknown scenario name, ...).
    #[error("invalid configuration: {0}")]
    InvalidKind(String),

    /// Row overlap between discovery and proxy designs is only meaningful when both are
    /// drawn from the same population covariance.
    #[error("overlap fraction > 0 requires identical discovery and proxy covariance specs")]
    OverlapWithShift,

    #[error("target covariance shift unreachable: {0}")]
    TargetUnreachable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Maps a filesystem read error to `MissingFile` when the file does not exist.
    pub(crate) fn from_read(err: std::io::Error, path: &std::path::Path) -> Error {
        if err.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::Io(err)
        }
    }
}
