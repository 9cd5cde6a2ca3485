use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max entrywise deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("observable is not projective: {0}")]
    NotProjective(String),

    #[error("eigenvalue {0} lies outside [-1, 1]")]
    SpectrumOutOfRange(f64),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("direction is not a unit vector (norm {0})")]
    NotUnitVector(f64),

    #[error("state must have real amplitudes (max imaginary part {0:.3e})")]
    ComplexAmplitudes(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("correlation matrix is zero; optimal directions are undefined")]
    ZeroCorrelation,

    #[error("witness does not anticommute with the Bell observables (defect {0:.3e})")]
    NotAnticommuting(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid Bell scenario: {0}")]
    InvalidScenario(String),

    #[error("unknown Pauli name: {0}")]
    UnknownPauli(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
