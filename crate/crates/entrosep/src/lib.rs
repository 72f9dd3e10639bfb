//! Entropy based separability tests for bipartite quantum states.
//!
//! The crate evaluates sums of measurement entropies against the floors that
//! separable states must respect and cross-checks every verdict against the
//! partial transpose test. A deterministic multistart optimizer reproduces
//! the floors numerically, and a one-parameter mixed family provides the
//! reference thresholds.

pub mod cli;
pub mod criteria;
pub mod entropy;
pub mod observables;
pub mod qstate;
pub mod sepmin;
pub mod werner;

use num_complex::Complex64;

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<Complex64>;

/// Hermiticity tolerance on the largest entry of M - M^H.
pub const TOL_HERMITIAN: f64 = 1e-9;
/// Unit trace tolerance.
pub const TOL_TRACE: f64 = 1e-9;
/// Vector normalization tolerance.
pub const TOL_NORM: f64 = 1e-9;
/// Positivity tolerance on the smallest eigenvalue.
pub const TOL_PSD: f64 = 1e-9;
/// A floor counts as violated only below bound minus this margin.
pub const TOL_VERDICT: f64 = 1e-9;
/// Eigenvalues closer than this collapse into one spectral projector.
pub const EIG_CLUSTER_GAP: f64 = 1e-8;
/// Probabilities below this are treated as exact zeros inside entropies.
pub const PROB_FLOOR: f64 = 1e-15;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("not hermitian: max |M - M^H| entry {deviation:.3e} exceeds {tol:.0e}")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state invariants violated: {}", .0.join("; "))]
    StateInvariants(Vec<String>),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no threshold: {0}")]
    NoThreshold(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
