//! Error types shared across the crate.

use crate::field::Field;

/// Errors produced by geometry, solver, spectral and flow routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An API contract was violated (shape mismatch, wrong grid kind, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// Newton iteration failed to reach the residual tolerance.
    /// Carries the last iterate for post-mortem inspection.
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        iterations: u32,
        residual: f64,
        last_iterate: Box<Field>,
    },

    /// The solver converged onto one of the constants -1, 0, +1.
    #[error("solver converged to the degenerate constant state u = {constant}")]
    DegenerateState { constant: f64 },

    /// Time integration produced an energy increase beyond the round-off budget.
    #[error("instability: energy increased by {increase:.3e} at t = {t:.4} (dt too large?)")]
    Instability { t: f64, increase: f64 },

    /// A linear or eigenvalue solve failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Mode truncation too small: the boundary modes still carry spectrum
    /// below the cluster threshold.
    #[error("truncation insufficient: mode ({k},{l}) has lowest eigenvalue {eigenvalue:.3e} <= delta {delta:.3e}; raise k_max/l_max")]
    Truncation {
        k: u32,
        l: u32,
        eigenvalue: f64,
        delta: f64,
    },

    /// The energy level requested for time normalization is not bracketed
    /// by the trace.
    #[error("normalization error: level {level:.6} not bracketed by trace energies [{lo:.6}, {hi:.6}]")]
    Normalization { level: f64, lo: f64, hi: f64 },

    /// Shooting preconditions failed (endpoints did not reach +-1, or the
    /// perturbed initial data leaves [-1, 1]).
    #[error("shooting precondition: {0}")]
    ShootingPrecondition(String),

    /// Bisection could not establish a bracket with opposite terminal
    /// classifications.
    #[error("dichotomy error: {0}")]
    Dichotomy(String),

    /// Underlying I/O failure (snapshot read/write).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed snapshot or sidecar file.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
