//! Numerical toolkit for bipartite qudit entanglement: spectral separability
//! criteria (reduction, partial transposition, Rényi-entropic), the Werner
//! and isotropic state families, positive maps represented by Choi matrices,
//! and a filter → twirl → generalized-XOR recurrence protocol that distills
//! entanglement from any state violating the reduction criterion.
//!
//! Layout:
//!
//! * [`matrix`] — dense complex matrices, Hermitian eigendecomposition, SVD.
//! * [`states`] — validated bipartite density matrices and named families.
//! * [`criteria`] — criterion checks returning spectral witness reports.
//! * [`maps`] — operator maps as Choi matrices: CP tests, Kraus extraction,
//!   and the transpose-composition structure of the reduction map.
//! * [`distill`] — local filters, exact and Monte-Carlo twirling, the
//!   recurrence step (closed form and brute-force simulation), and
//!   end-to-end distillation runs.
//! * [`wire`] — JSON/CSV formats shared with the CLI.
//!
//! All randomness is explicit: operations that sample take a `u64` seed and
//! are bit-reproducible. Everything else is a pure function of its inputs.

pub mod criteria;
pub mod distill;
pub mod error;
pub mod matrix;
pub mod maps;
pub mod states;
pub mod wire;

mod rng;

pub use error::{Error, Result};
pub use matrix::{frob_dist, ComplexMatrix, Spectrum, Svd};
pub use states::{BipartiteState, PureState, SchmidtDecomposition, Side};

/// Numerical tolerances used by validation and verdicts across the crate.
pub mod tol {
    /// Max entry of |m − m†| accepted before a matrix is rejected as
    /// non-Hermitian.
    pub const HERMITICITY: f64 = 1e-10;
    /// Allowed deviation of a density-matrix trace from 1.
    pub const TRACE: f64 = 1e-10;
    /// Eigenvalues of a density matrix may dip this far below zero.
    pub const PSD: f64 = 1e-9;
    /// Spectral criteria count as satisfied when the witness minimum is at
    /// least −CRITERION; values in (−CRITERION, 0) are flagged borderline.
    pub const CRITERION: f64 = 1e-9;
    /// Unit-norm requirement on pure-state amplitude vectors.
    pub const PURE_NORM: f64 = 1e-12;
    /// Slack accepted on closed parameter ranges (e.g. α ∈ [−1/(n²−1), 1]).
    pub const RANGE_SLACK: f64 = 1e-12;
    /// Two equal-looking minimal eigenvalues within this window count as a
    /// degenerate witness.
    pub const WITNESS_TIE: f64 = 1e-12;
    /// A recurrence round that improves α by less than this has stalled.
    pub const STALL: f64 = 1e-12;
}

/// Side-length cap for collectively regrouped or simulated composite spaces
/// (two pairs at local dimension n occupy side n⁴). Keeps dense temporaries
/// within desk-scale memory.
pub const MAX_COMPOSITE_DIM: usize = 4096;
