//! CHSH operator assembly, correlation matrices and their closed-form
//! maximization.
//!
//! For a two-qubit state with correlation matrix `T`, the maximal CHSH
//! value over planar measurements is `2‖T‖_F`; over arbitrary qubit
//! measurements it is `2√(u₁+u₂)` with `u₁ ≥ u₂` the largest eigenvalues
//! of `TᵗT` (the Horodecki criterion). The two routes agree on real
//! states and both are checked against the see-saw oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    expectation, expectation_density, kron, kron_all, partial_trace, ComplexMatrix, PureState,
};
use crate::observables::{
    direction_observable, pauli, DichotomicObservable, MeasurementDirection, Pauli,
};
use crate::tolerances::RANK_TOL;

/// Pauli basis used for a correlation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationBasis {
    /// 2×2 matrix over `(X, Z)`, enough for real states.
    XZ,
    /// 3×3 matrix over `(X, Y, Z)`.
    XYZ,
}

impl CorrelationBasis {
    fn paulis(self) -> &'static [Pauli] {
        match self {
            CorrelationBasis::XZ => &[Pauli::X, Pauli::Z],
            CorrelationBasis::XYZ => &[Pauli::X, Pauli::Y, Pauli::Z],
        }
    }
}

/// Matrix of pair expectations `T_ij = ⟨σ_i ⊗ σ_j⟩` of a two-qubit state.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    basis: CorrelationBasis,
    entries: Vec<f64>,
}

impl CorrelationMatrix {
    /// Build from explicit entries (row-major); all entries must lie in
    /// `[-1, 1]`.
    pub fn new(basis: CorrelationBasis, entries: Vec<f64>) -> Result<Self> {
        let size = basis.paulis().len();
        if entries.len() != size * size {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} correlation matrix",
                entries.len(),
                size,
                size
            )));
        }
        for &e in &entries {
            if e.abs() > 1.0 + 1e-9 {
                return Err(Error::OutOfRange(format!("correlation entry {}", e)));
            }
        }
        Ok(Self { basis, entries })
    }

    pub fn basis(&self) -> CorrelationBasis {
        self.basis
    }

    pub fn size(&self) -> usize {
        self.basis.paulis().len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size() + j]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    /// Apply to a real vector.
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j) * v[j]).sum())
            .collect()
    }

    /// `T Tᵗ` as a complex matrix (for the shared eigensolver).
    pub(crate) fn gram(&self) -> ComplexMatrix {
        let n = self.size();
        let mut g = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let val: f64 = (0..n).map(|k| self.entry(i, k) * self.entry(j, k)).sum();
                g[(i, j)] = Complex64::new(val, 0.0);
            }
        }
        g
    }
}

/// Correlation matrix of a two-qubit density matrix.
pub fn correlation_matrix(
    rho_ab: &ComplexMatrix,
    basis: CorrelationBasis,
) -> Result<CorrelationMatrix> {
    if rho_ab.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit density matrix must have dimension 4, got {}",
            rho_ab.dim()
        )));
    }
    let dev = rho_ab.hermitian_deviation();
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let trace = rho_ab.trace();
    if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
        return Err(Error::OutOfRange(format!(
            "density matrix trace {} is not 1",
            trace.re
        )));
    }
    let paulis = basis.paulis();
    let mut entries = Vec::with_capacity(paulis.len() * paulis.len());
    for &pa in paulis {
        for &pb in paulis {
            let op = kron(&pauli(pa), &pauli(pb));
            entries.push(expectation_density(rho_ab, &op)?);
        }
    }
    // Mild clamping: expectations of unit-spectrum observables can ride a
    // rounding error above 1.
    let entries = entries
        .into_iter()
        .map(|e| e.clamp(-1.0, 1.0))
        .collect();
    CorrelationMatrix::new(basis, entries)
}

/// The four measurement directions of a CHSH configuration, together with
/// the angle θ splitting Bob's pair: `b̂₁ + b̂₂ = 2cos θ d̂₁`,
/// `b̂₁ - b̂₂ = 2sin θ d̂₂` with `d̂₁ ⊥ d̂₂`.
#[derive(Debug, Clone)]
pub struct ChshMeasurements {
    pub a1: MeasurementDirection,
    pub a2: MeasurementDirection,
    pub b1: MeasurementDirection,
    pub b2: MeasurementDirection,
    pub theta: f64,
}

impl ChshMeasurements {
    /// Assemble from Alice directions, the orthogonal pair `d̂₁ ⊥ d̂₂` and
    /// the splitting angle.
    pub fn from_split(
        a1: MeasurementDirection,
        a2: MeasurementDirection,
        d1: &[f64],
        d2: &[f64],
        theta: f64,
    ) -> Result<Self> {
        let (c, s) = (theta.cos(), theta.sin());
        let b1: Vec<f64> = d1.iter().zip(d2).map(|(x, y)| c * x + s * y).collect();
        let b2: Vec<f64> = d1.iter().zip(d2).map(|(x, y)| c * x - s * y).collect();
        // Rounding in a near-degenerate split can leave the combinations a
        // few ulps off unit length.
        let unit = |v: &[f64]| -> Result<MeasurementDirection> {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return Err(Error::NotUnitVector(norm));
            }
            let scaled: Vec<f64> = v.iter().map(|x| x / norm).collect();
            MeasurementDirection::new(&scaled)
        };
        Ok(Self {
            a1,
            a2,
            b1: unit(&b1)?,
            b2: unit(&b2)?,
            theta,
        })
    }

    /// The four observables `(A₁, A₂, B₁, B₂)`.
    pub fn observables(
        &self,
    ) -> (
        DichotomicObservable,
        DichotomicObservable,
        DichotomicObservable,
        DichotomicObservable,
    ) {
        (
            direction_observable(&self.a1),
            direction_observable(&self.a2),
            direction_observable(&self.b1),
            direction_observable(&self.b2),
        )
    }

    /// Reconstruct `(d̂₁, d̂₂)` from Bob's directions; available when the
    /// splitting angle is away from the degenerate endpoints.
    pub fn split_directions(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let (c, s) = (self.theta.cos(), self.theta.sin());
        if c.abs() < 1e-12 || s.abs() < 1e-12 {
            return None;
        }
        let d1: Vec<f64> = self
            .b1
            .components()
            .iter()
            .zip(self.b2.components())
            .map(|(x, y)| (x + y) / (2.0 * c))
            .collect();
        let d2: Vec<f64> = self
            .b1
            .components()
            .iter()
            .zip(self.b2.components())
            .map(|(x, y)| (x - y) / (2.0 * s))
            .collect();
        Some((d1, d2))
    }
}

/// `A₁ ⊗ (B₁ + B₂) + A₂ ⊗ (B₁ - B₂)`.
pub fn chsh_operator(
    a1: &DichotomicObservable,
    a2: &DichotomicObservable,
    b1: &DichotomicObservable,
    b2: &DichotomicObservable,
) -> Result<ComplexMatrix> {
    if a1.dim() != a2.dim() || b1.dim() != b2.dim() {
        return Err(Error::DimensionMismatch(
            "CHSH operator needs equal dimensions within each site".into(),
        ));
    }
    let sum = b1.matrix() + b2.matrix();
    let diff = b1.matrix() - b2.matrix();
    Ok(&kron(a1.matrix(), &sum) + &kron(a2.matrix(), &diff))
}

/// `tr(B_AB ρ)` for a two-qubit density matrix and planar measurements.
pub fn chsh_value(rho: &ComplexMatrix, m: &ChshMeasurements) -> Result<f64> {
    let (a1, a2, b1, b2) = m.observables();
    let op = chsh_operator(&a1, &a2, &b1, &b2)?;
    expectation_density(rho, &op)
}

/// Maximal CHSH value of a two-qubit state over arbitrary measurements:
/// `2√(u₁+u₂)` with `u₁ ≥ u₂` the two largest eigenvalues of `TᵗT`.
pub fn horodecki_max(t: &CorrelationMatrix) -> Result<f64> {
    if t.basis() != CorrelationBasis::XYZ {
        return Err(Error::DimensionMismatch(
            "horodecki_max expects a 3x3 XYZ correlation matrix".into(),
        ));
    }
    let eig = crate::linalg::hermitian_eig(&t.gram())?;
    let n = eig.eigenvalues.len();
    let top_two = eig.eigenvalues[n - 1] + eig.eigenvalues[n - 2];
    Ok(2.0 * top_two.max(0.0).sqrt())
}

/// Maximal CHSH value over real planar measurements: `2‖T‖_F`.
pub fn real_max(t: &CorrelationMatrix) -> Result<f64> {
    if t.basis() != CorrelationBasis::XZ {
        return Err(Error::DimensionMismatch(
            "real_max expects a 2x2 XZ correlation matrix".into(),
        ));
    }
    Ok(2.0 * t.frobenius_norm())
}

/// Measurements achieving `real_max` for a 2×2 correlation matrix.
///
/// `d̂₁, d̂₂` are the right singular vectors of `T` (descending singular
/// value), `θ = atan2(‖T d̂₂‖, ‖T d̂₁‖)`, and Alice's directions are the
/// normalized images `T d̂_i`. A zero matrix has no maximizer.
pub fn optimal_directions(t: &CorrelationMatrix) -> Result<ChshMeasurements> {
    if t.basis() != CorrelationBasis::XZ {
        return Err(Error::DimensionMismatch(
            "optimal_directions expects a 2x2 XZ correlation matrix".into(),
        ));
    }
    // Right singular vectors = eigenvectors of TᵗT.
    let mut gram = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            let val: f64 = (0..2).map(|k| t.entry(k, i) * t.entry(k, j)).sum();
            gram[(i, j)] = Complex64::new(val, 0.0);
        }
    }
    let eig = crate::linalg::hermitian_eig(&gram)?;
    let d1: Vec<f64> = eig.eigenvector(1).iter().map(|z| z.re).collect();
    let d2: Vec<f64> = eig.eigenvector(0).iter().map(|z| z.re).collect();

    let t_d1 = t.apply(&d1);
    let t_d2 = t.apply(&d2);
    let s1 = (t_d1[0] * t_d1[0] + t_d1[1] * t_d1[1]).sqrt();
    let s2 = (t_d2[0] * t_d2[0] + t_d2[1] * t_d2[1]).sqrt();
    if s1 <= RANK_TOL {
        return Err(Error::ZeroCorrelation);
    }
    let a1 = MeasurementDirection::planar(t_d1[0] / s1, t_d1[1] / s1)?;
    let a2 = if s2 > RANK_TOL {
        MeasurementDirection::planar(t_d2[0] / s2, t_d2[1] / s2)?
    } else {
        // Rank-one T: the second direction carries no weight; keep it
        // orthogonal to the first.
        let c = a1.components();
        MeasurementDirection::planar(-c[1], c[0])?
    };
    let theta = s2.atan2(s1);
    ChshMeasurements::from_split(a1, a2, &d1, &d2, theta)
}

/// Party pair of a three-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChshPair {
    AB,
    AC,
    BC,
}

impl ChshPair {
    /// Factor indices kept when tracing out the third party.
    pub fn keep(self) -> [usize; 2] {
        match self {
            ChshPair::AB => [0, 1],
            ChshPair::AC => [0, 2],
            ChshPair::BC => [1, 2],
        }
    }
}

/// Maximal CHSH value of one pair of a real three-qubit state, from the
/// Y-pair expectations alone:
/// `2√(1 + ⟨Y_PY_Q⟩² - ⟨Y_PY_R⟩² - ⟨Y_QY_R⟩²)` for pair `(P,Q)` with
/// spectator `R`. Agrees with `real_max` of the pair's correlation matrix.
pub fn pair_chsh_max(psi: &PureState, pair: ChshPair) -> Result<f64> {
    if psi.factor_dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(
            "pair_chsh_max expects a three-qubit state".into(),
        ));
    }
    let max_im = psi.max_imag();
    if max_im > 1e-12 {
        return Err(Error::ComplexAmplitudes(max_im));
    }
    let yy = yy_expectations(psi)?;
    let (own, other1, other2) = match pair {
        ChshPair::AB => (yy[0], yy[1], yy[2]),
        ChshPair::AC => (yy[1], yy[0], yy[2]),
        ChshPair::BC => (yy[2], yy[0], yy[1]),
    };
    let radicand = 1.0 + own * own - other1 * other1 - other2 * other2;
    Ok(2.0 * radicand.max(0.0).sqrt())
}

/// `(⟨Y_AY_B⟩, ⟨Y_AY_C⟩, ⟨Y_BY_C⟩)` of a three-qubit state.
pub fn yy_expectations(psi: &PureState) -> Result<[f64; 3]> {
    let y = pauli(Pauli::Y);
    let id = pauli(Pauli::I);
    let yy_ab = expectation(psi, &kron_all(&[&y, &y, &id]))?;
    let yy_ac = expectation(psi, &kron_all(&[&y, &id, &y]))?;
    let yy_bc = expectation(psi, &kron_all(&[&id, &y, &y]))?;
    Ok([yy_ab, yy_ac, yy_bc])
}

/// Reduced two-qubit state of one pair, ordered `(first, second)` party.
pub fn pair_marginal(psi: &PureState, pair: ChshPair) -> Result<ComplexMatrix> {
    partial_trace(&psi.density(), psi.factor_dims(), &pair.keep())
}

/// The singlet `(|01⟩ - |10⟩)/√2`.
pub fn singlet() -> PureState {
    let r = 1.0 / 2.0_f64.sqrt();
    PureState::from_real(vec![2, 2], &[0.0, r, -r, 0.0]).expect("singlet is normalized")
}
