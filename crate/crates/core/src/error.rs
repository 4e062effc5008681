//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong constructing or transforming states, maps,
/// and protocol objects. Numerical tolerances behind the checks live next to
/// the operations that enforce them (see [`crate::tol`]).
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |m - m\u{2020}| entry = {max_dev:.3e} exceeds {tol:.1e}")]
    NotHermitian { max_dev: f64, tol: f64 },

    #[error("{len} entries do not fill a {rows}x{cols} matrix")]
    ShapeMismatch { len: usize, rows: usize, cols: usize },

    #[error("dimension {dim} is too small (minimum {min})")]
    BadDimension { dim: usize, min: usize },

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a density matrix: {reason}")]
    NotDensityMatrix { reason: String },

    #[error("action is not linear: spot-test residual {residual:.3e}")]
    NonlinearAction { residual: f64 },

    #[error("composite dimension {dim} exceeds the supported cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("map is not completely positive: Choi min eigenvalue {min_eigenvalue:.3e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("state does not violate the reduction criterion; no filter can be built")]
    NotViolating,

    #[error("filter success probability {probability:.3e} is indistinguishable from zero")]
    ZeroProbability { probability: f64 },

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
