//! Error type shared by the solver, geometry, and problem-file code.

use thiserror::Error;

/// Everything that can go wrong outside of plain I/O helpers.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A caller violated an operation's contract (bad argument, infeasible
    /// point, unsupported layout, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The entropic mirror map was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerically degenerate intermediate (e.g. a simplex block whose
    /// multiplicative weights underflowed to zero).
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    /// A problem instance failed validation (non-monotone matrix,
    /// inconsistent Lipschitz constant, infeasible block sums, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A problem file could not be parsed; names the offending field when known.
    #[error("parse error: {0}")]
    Parse(String),

    /// File-system failure while reading or writing an artifact.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A per-step inequality check failed while running in strict mode.
    #[error("diagnostics violation at step {t}: {check} (lhs {lhs:.6e} > rhs {rhs:.6e})")]
    Diagnostics {
        t: usize,
        check: &'static str,
        lhs: f64,
        rhs: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// An I/O error tagged with the path it concerns.
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
