//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the simulation and analysis routines.
///
/// Capacity problems (state vectors that would not fit in memory) are kept
/// distinct from other failures so callers can map them to a dedicated exit
/// path.
#[derive(Debug, Error)]
pub enum Error {
    /// A chain is too long for full state-vector evolution.
    #[error(
        "chain length {length} exceeds the state-vector limit of {max} spins \
         (a vector alone needs {} GiB; Krylov scratch multiplies that by ~50)",
        (16u128 << length) as f64 / (1u64 << 30) as f64
    )]
    ChainTooLong { length: usize, max: usize },

    /// A chain is too long for the dense-matrix reference propagator.
    #[error("chain length {length} exceeds the dense-propagator limit of {max} spins")]
    DenseTooLong { length: usize, max: usize },

    /// An amplitude buffer does not match the chain dimension.
    #[error("state vector holds {got} amplitudes but a {length}-spin chain needs {expected}")]
    DimensionMismatch {
        got: usize,
        expected: usize,
        length: usize,
    },

    /// A basis-state string contained something other than '0'/'1'.
    #[error("invalid basis-state string {string:?}: {reason}")]
    BadStateString { string: String, reason: String },

    /// A sweep grid or curve was malformed.
    #[error("invalid sweep grid: {0}")]
    BadGrid(String),

    /// The Lanczos propagator could not reach its accuracy target.
    #[error("Krylov propagation failed to converge: {0}")]
    Convergence(String),

    /// A snapshot file could not be read or written.
    #[error("snapshot I/O failed: {0}")]
    Io(#[from] std::io::Error),

    /// A snapshot file was not valid JSON or disagreed with its header.
    #[error("snapshot format error: {0}")]
    Snapshot(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Snapshot(err.to_string())
    }
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
