//! Error type shared by every stage of the engine.

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading data, processing an ROI or computing features.
#[derive(Debug, Error)]
pub enum Error {
    /// A grid index lies outside the grid.
    #[error("index {index:?} outside grid of dimensions {dims:?}")]
    OutOfBounds { index: [usize; 3], dims: [usize; 3] },
    /// Grid geometry is not valid (zero dimension, non-positive spacing).
    #[error("invalid grid geometry: {0}")]
    Geometry(String),
    /// Contour input is malformed or cannot be placed on the grid.
    #[error("malformed contour: {0}")]
    Contour(String),
    /// The ROI holds no voxels at the named stage.
    #[error("empty ROI at stage '{0}'")]
    EmptyRoi(String),
    /// An input value violates an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A processing configuration is invalid or incomplete.
    #[error("configuration error: {0}")]
    Config(String),
    /// Geometry is too degenerate for the requested construction.
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    /// A mesh is not a closed, consistently oriented surface.
    #[error("open or inconsistently wound mesh: {0}")]
    Manifold(String),
    /// Inputs that must agree (geometry, families, sizes) do not.
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    /// Voxel datatype is not one of the supported encodings.
    #[error("unsupported voxel datatype: {0}")]
    UnsupportedDatatype(String),
    /// File format is unsupported or the file is corrupt.
    #[error("unsupported or malformed file: {0}")]
    Format(String),
    /// File payload is shorter than its header announces.
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    /// Reading or writing a file failed.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// An internal invariant was violated.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code: 1 for configuration errors, 3 for violated
    /// invariants, 2 for everything caused by input data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Invariant(_) | Error::Manifold(_) | Error::OutOfBounds { .. } => 3,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
