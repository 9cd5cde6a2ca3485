//! Numerical toolkit for CHSH correlations and their monogamy.
//!
//! Three parties sharing a quantum state and measuring one of two local
//! observables each cannot violate the CHSH inequality freely with both
//! partners: the pair values obey `⟨B_AB⟩² + ⟨B_AC⟩² ≤ 8`, a disc whose
//! boundary generalizes Tsirelson's bound `|⟨B⟩| ≤ 2√2`. This crate
//! implements the constructive machinery around that trade-off:
//!
//! - [`linalg`]: dense complex matrices, a Jacobi Hermitian eigensolver,
//!   tensor products, partial traces, pure states.
//! - [`observables`]: dichotomic (±1) observables, Pauli and planar
//!   families, normalized commutator witnesses.
//! - [`canonical`]: simultaneous 2×2 block form of a pair of projective
//!   observables — the dimension-reduction step.
//! - [`chsh`]: CHSH operators, correlation matrices, the Frobenius-norm
//!   and Horodecki maximizations, optimal measurement construction.
//! - [`monogamy`]: the boundary state family, joint maximization with
//!   shared Alice observables, trade-off verification.
//! - [`witness`]: bounds on Bell violations from expectations of
//!   anticommuting observables, local commutator bounds, Tsirelson's
//!   commutator relation.
//! - [`seesaw`]: an independent alternating-maximization oracle for
//!   arbitrary two-measurement correlation Bell operators.
//! - [`regions`]: the classical/quantum/no-signalling picture as data.
//! - [`cli`]: the `bellmono` executable.

#![forbid(unsafe_code)]

pub mod canonical;
pub mod chsh;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod monogamy;
pub mod numfmt;
pub mod observables;
pub mod regions;
pub mod seesaw;
pub mod tolerances;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, PureState};
pub use observables::{DichotomicObservable, MeasurementDirection, Pauli};
