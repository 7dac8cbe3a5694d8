//! Crate-wide error type.
//!
//! Variants fall into two families, and the CLI maps them onto exit codes
//! accordingly:
//!
//! * **domain** conditions — the input is well-formed but the mathematics
//!   refuses the operation (a deflating update, a singular `W` factor, …);
//! * **usage** conditions — ill-formed input: mismatched shapes, files that
//!   do not parse, invalid configuration.

use std::fmt;
use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode reported by this crate.
#[derive(Debug)]
pub enum Error {
    /// Operand shapes do not agree.
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },
    /// A matrix that must have orthonormal columns does not.
    NotOrthonormal {
        context: &'static str,
        defect: f64,
        tol: f64,
    },
    /// A vector or matrix violates a tangent-space constraint
    /// (unit length, orthogonality to the base point).
    NotTangent {
        context: &'static str,
        defect: f64,
        tol: f64,
    },
    /// The `W` factor is numerically singular: a pivot fell below the
    /// scale-aware threshold.
    SingularW { pivot: f64, threshold: f64 },
    /// The update direction `a` lies in the current column span, so no
    /// new direction can be extracted from it.
    InRange { residual_norm: f64, tol: f64 },
    /// The update coefficient vector `b` is zero (or the solve against
    /// `W` underflowed to zero), so there is no rank-one direction.
    ZeroB,
    /// The update lowers the rank: the result has no full-rank
    /// factorization of the same width.
    Deflating,
    /// A matrix expected to have full column rank does not.
    RankDeficient { column: usize },
    /// The iterative decomposition failed to converge.
    NoConvergence { sweeps: usize },
    /// An input exceeds a routine's supported size.
    TooLarge {
        context: &'static str,
        size: usize,
        max: usize,
    },
    /// A configuration value is out of its valid range.
    InvalidConfig { message: String },
    /// An operating-system I/O failure.
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A text file did not match its expected format.
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    /// Whether this error reports a *domain* condition (well-formed input,
    /// mathematically refused) as opposed to a usage or I/O problem.
    ///
    /// The CLI exits with code 1 for domain errors and 2 for the rest.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::SingularW { .. }
                | Error::InRange { .. }
                | Error::ZeroB
                | Error::Deflating
                | Error::RankDeficient { .. }
                | Error::NoConvergence { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                context,
                expected,
                got,
            } => write!(
                f,
                "{context}: dimension mismatch (expected {expected}, got {got})"
            ),
            Error::NotOrthonormal {
                context,
                defect,
                tol,
            } => write!(
                f,
                "{context}: columns are not orthonormal (defect {defect:.3e} exceeds tolerance {tol:.3e})"
            ),
            Error::NotTangent {
                context,
                defect,
                tol,
            } => write!(
                f,
                "{context}: tangent-space constraint violated (defect {defect:.3e} exceeds tolerance {tol:.3e})"
            ),
            Error::SingularW { pivot, threshold } => write!(
                f,
                "W factor is numerically singular (pivot {pivot:.3e} below threshold {threshold:.3e})"
            ),
            Error::InRange { residual_norm, tol } => write!(
                f,
                "update direction lies in the current subspace (residual {residual_norm:.3e} at or below tolerance {tol:.3e})"
            ),
            Error::ZeroB => write!(f, "update coefficient vector b is zero"),
            Error::Deflating => write!(f, "deflating update"),
            Error::RankDeficient { column } => write!(
                f,
                "matrix is numerically rank-deficient at column {column}"
            ),
            Error::NoConvergence { sweeps } => write!(
                f,
                "Jacobi SVD did not converge within {sweeps} sweeps"
            ),
            Error::TooLarge { context, size, max } => write!(
                f,
                "{context}: size {size} exceeds the supported maximum of {max}"
            ),
            Error::InvalidConfig { message } => write!(f, "{message}"),
            Error::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Error::Parse {
                path,
                line,
                message,
            } => write!(f, "{}:{line}: {message}", path.display()),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
