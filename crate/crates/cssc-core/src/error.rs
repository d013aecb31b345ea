//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by the library.
///
/// The split mirrors how callers need to react: bad arguments
/// (`InvalidSpin`, `InvalidParameter`, `NonFinite`), points outside a
/// chart's validity domain (`ChartDomain`, `CoordinateSingular`), solver
/// breakdowns (`NoConvergence`), hard resource limits (`DimensionCap`)
/// and violations of identities that must hold by construction
/// (`IdentityViolation` — these indicate an internal defect, never user
/// error).
#[derive(Debug, Error)]
pub enum Error {
    /// A spin label that is not a non-negative half-integer.
    #[error("invalid spin: {0}")]
    InvalidSpin(String),
    /// A model or routine parameter outside its documented domain.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    /// Non-finite value fed to a routine that requires finite reals.
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    /// Point outside the validity domain of a coordinate chart.
    #[error("chart domain: {0}")]
    ChartDomain(String),
    /// Angular coordinates are indeterminate at this point (the chart
    /// origin); radial quantities remain well defined.
    #[error("coordinate singularity: {0}")]
    CoordinateSingular(&'static str),
    /// Representation dimension above the dense-solver cap.
    #[error("representation dimension {0} exceeds the cap of {1}")]
    DimensionCap(usize, usize),
    /// An iterative solver hit its iteration budget without meeting its
    /// tolerance. The message carries the best residual reached.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// An algebraic identity that holds by construction was violated
    /// numerically; report this as a bug.
    #[error("internal identity violation: {0}")]
    IdentityViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
