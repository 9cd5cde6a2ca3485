//! Centralized numerical tolerances.
//!
//! Two regimes: algebraic identities that hold to machine precision up to
//! mild accumulation, and iterative optimization where convergence is
//! limited by the stopping rule.

/// Exact algebraic identities (traces, reconstructions, commutators).
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// Values produced by iterative optimization (see-saw, scans).
pub const OPT_TOL: f64 = 1e-6;

/// Entrywise Hermiticity check `max |M - M†|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Norm of state vectors and measurement directions.
pub const NORM_TOL: f64 = 1e-12;

/// Distance of an eigenvalue from ±1 below which an observable is
/// certified projective.
pub const PROJECTIVE_TOL: f64 = 1e-9;

/// Reconstruction accuracy of the canonical block form.
pub const CANONICAL_TOL: f64 = 1e-9;

/// Jacobi sweep target: off-diagonal Frobenius norm relative to the input.
pub const JACOBI_REL_TOL: f64 = 1e-13;

/// Singular values below this are treated as vanishing when completing
/// unitary factors.
pub const RANK_TOL: f64 = 1e-9;
