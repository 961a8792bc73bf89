//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of the library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("element is not loxodromic")]
    NotLoxodromic,
    #[error("quadrature failed to reach tolerance: {0}")]
    QuadratureFailure(String),
    #[error("series acceleration did not stabilize: {0}")]
    SeriesDivergence(String),
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    #[error("character is trivial")]
    TrivialCharacter,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("input cannot be represented exactly: {0}")]
    InexactInput(String),
    #[error("representation image is not unitary: {0}")]
    NonUnitaryInput(String),
    #[error("stabilizer relation violated: {0}")]
    RelationViolation(String),
    #[error("vector is not fixed by the cusp stabilizer")]
    NotSingularVector,
    #[error("sampler is not periodic: mismatch {0:.3e}")]
    PeriodicityViolation(f64),
    #[error("unsupported stabilizer index {0}")]
    CaseUnsupported(u32),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
}

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;
