//! Joint CHSH maximization with shared Alice measurements, the tight state
//! family, and verification of the monogamy disc
//! `⟨B_AB⟩² + ⟨B_AC⟩² ≤ 8`.
//!
//! For a real three-qubit state the two Gram matrices `T_AB T_ABᵗ` and
//! `T_AC T_ACᵗ` commute, so Alice's two directions can be chosen as common
//! eigenvectors; the pair values then satisfy
//! `⟨B_AB⟩² + ⟨B_AC⟩² = 8(1 - ⟨Y_BY_C⟩²)` and both maxima are reached with
//! the same Alice observables.

use serde::Serialize;

use crate::chsh::{
    chsh_value, correlation_matrix, pair_marginal, yy_expectations, ChshMeasurements, ChshPair,
    CorrelationBasis, CorrelationMatrix,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, PureState};
use crate::observables::MeasurementDirection;

/// The three `⟨Y ⊗ Y⟩` pair expectations of a three-qubit state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairExpectations {
    pub yy_ab: f64,
    pub yy_ac: f64,
    pub yy_bc: f64,
}

/// Parameter of the boundary family, `t ∈ [0, π/4]`.
#[derive(Debug, Clone, Copy)]
pub struct TightFamilyParameter(f64);

impl TightFamilyParameter {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_4 + 1e-12).contains(&t) {
            return Err(Error::OutOfRange(format!(
                "tight family parameter {} outside [0, π/4]",
                t
            )));
        }
        Ok(Self(t))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Output of `joint_max`.
#[derive(Debug, Clone)]
pub struct JointMaxResult {
    /// Achieved `⟨B_AB⟩`, reproduced by explicit evaluation.
    pub value_ab: f64,
    /// Achieved `⟨B_AC⟩` with the same Alice observables.
    pub value_ac: f64,
    /// Alice's shared orthonormal measurement directions.
    pub alice_dirs: (MeasurementDirection, MeasurementDirection),
    /// Full AB configuration.
    pub bob_meas: ChshMeasurements,
    /// Full AC configuration (Alice entries identical to `bob_meas`).
    pub charlie_meas: ChshMeasurements,
    /// Set when the construction hit a degenerate branch (rank-deficient
    /// correlation matrix or ambiguous common eigenbasis); the equality
    /// with `8(1 - ⟨Y_BY_C⟩²)` is then not certified, only the bound.
    pub degenerate: bool,
}

impl JointMaxResult {
    pub fn sum_of_squares(&self) -> f64 {
        self.value_ab * self.value_ab + self.value_ac * self.value_ac
    }
}

/// Boundary state `c₋(|010⟩ + |011⟩) + c₊(|100⟩ + |101⟩)` with
/// `c± = ½√(1 ± √2 sin t)`; sweeps the quarter circle
/// `(2√2 cos t, 2√2 sin t)` as `t` runs over `[0, π/4]`.
pub fn tight_family(t: TightFamilyParameter) -> PureState {
    let s = 2.0_f64.sqrt() * t.value().sin();
    let c_minus = 0.5 * (1.0 - s).max(0.0).sqrt();
    let c_plus = 0.5 * (1.0 + s).sqrt();
    let mut amps = vec![0.0; 8];
    amps[2] = c_minus; // |010⟩
    amps[3] = c_minus; // |011⟩
    amps[4] = c_plus; // |100⟩
    amps[5] = c_plus; // |101⟩
    PureState::from_real(vec![2, 2, 2], &amps).expect("family states are normalized")
}

/// The three Y⊗Y pair expectations.
pub fn pair_expectations(psi: &PureState) -> Result<PairExpectations> {
    if psi.factor_dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(
            "pair_expectations expects a three-qubit state".into(),
        ));
    }
    let [yy_ab, yy_ac, yy_bc] = yy_expectations(psi)?;
    Ok(PairExpectations {
        yy_ab,
        yy_ac,
        yy_bc,
    })
}

/// Frobenius norm of `[T_AB T_ABᵗ, T_AC T_ACᵗ]`; vanishes for states with
/// real amplitudes, may not for complex ones.
pub fn commutation_defect(psi: &PureState) -> Result<f64> {
    let (g_ab, g_ac) = pair_grams(psi)?;
    Ok((&(&g_ab * &g_ac) - &(&g_ac * &g_ab)).frobenius_norm())
}

/// `8 - v_ab² - v_ac²`; nonnegative for quantum-achievable pairs.
pub fn monogamy_residual(v_ab: f64, v_ac: f64) -> f64 {
    8.0 - v_ab * v_ab - v_ac * v_ac
}

fn pair_grams(psi: &PureState) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if psi.factor_dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(
            "expected a three-qubit state".into(),
        ));
    }
    let t_ab = correlation_matrix(&pair_marginal(psi, ChshPair::AB)?, CorrelationBasis::XZ)?;
    let t_ac = correlation_matrix(&pair_marginal(psi, ChshPair::AC)?, CorrelationBasis::XZ)?;
    Ok((t_ab.gram(), t_ac.gram()))
}

/// Largest off-diagonal magnitude of `bᵗ g b` for a candidate orthonormal
/// basis `b` given as two real 2-vectors.
fn cross_offdiag(g: &ComplexMatrix, basis: &([f64; 2], [f64; 2])) -> f64 {
    let (u, v) = basis;
    let gu = [
        g[(0, 0)].re * u[0] + g[(0, 1)].re * u[1],
        g[(1, 0)].re * u[0] + g[(1, 1)].re * u[1],
    ];
    (v[0] * gu[0] + v[1] * gu[1]).abs()
}

fn eigenbasis_2x2(g: &ComplexMatrix) -> Result<([f64; 2], [f64; 2])> {
    let eig = hermitian_eig(g)?;
    // Descending eigenvalue: first direction carries the larger gain.
    let top = eig.eigenvector(1);
    let bottom = eig.eigenvector(0);
    Ok(([top[0].re, top[1].re], [bottom[0].re, bottom[1].re]))
}

/// A common orthonormal eigenbasis of the two (commuting) Gram matrices.
/// Falls back through deterministic candidates; reports whether the choice
/// was forced by degeneracy.
fn simultaneous_eigenbasis(
    g_ab: &ComplexMatrix,
    g_ac: &ComplexMatrix,
) -> Result<(([f64; 2], [f64; 2]), bool)> {
    let scale = g_ab.frobenius_norm() + g_ac.frobenius_norm();
    let tol = 1e-8 * (1.0 + scale);
    // A generic combination separates the joint eigenspaces whenever they
    // are separable at all.
    let combined = &g_ab.scale_re(1.0) + &g_ac.scale_re(std::f64::consts::SQRT_2);
    let axes = ([1.0, 0.0], [0.0, 1.0]);
    let candidates = [
        eigenbasis_2x2(&combined)?,
        eigenbasis_2x2(g_ab)?,
        eigenbasis_2x2(g_ac)?,
        axes,
    ];
    for basis in &candidates {
        if cross_offdiag(g_ab, basis) <= tol && cross_offdiag(g_ac, basis) <= tol {
            return Ok((*basis, false));
        }
    }
    // Both Grams are (numerically) scalar in every candidate basis only in
    // genuinely degenerate situations; keep the best candidate and flag it.
    let best = candidates
        .iter()
        .min_by(|a, b| {
            let ra = cross_offdiag(g_ab, a).max(cross_offdiag(g_ac, a));
            let rb = cross_offdiag(g_ab, b).max(cross_offdiag(g_ac, b));
            ra.partial_cmp(&rb).unwrap()
        })
        .copied()
        .expect("nonempty candidate list");
    Ok((best, true))
}

/// Images `d̂_i = unit(Tᵗ â'_i)` with the orthogonal-substitution rule for
/// vanishing images; returns the two unit vectors, their gains
/// `‖T d̂_i‖ = √λ_i`, and whether a substitution was needed.
fn split_pair(
    t: &CorrelationMatrix,
    alice: &([f64; 2], [f64; 2]),
) -> (([f64; 2], [f64; 2]), [f64; 2], bool) {
    let tt = |v: &[f64; 2]| -> [f64; 2] {
        [
            t.entry(0, 0) * v[0] + t.entry(1, 0) * v[1],
            t.entry(0, 1) * v[0] + t.entry(1, 1) * v[1],
        ]
    };
    let raw = [tt(&alice.0), tt(&alice.1)];
    let norms = [
        (raw[0][0] * raw[0][0] + raw[0][1] * raw[0][1]).sqrt(),
        (raw[1][0] * raw[1][0] + raw[1][1] * raw[1][1]).sqrt(),
    ];
    let cutoff = 1e-9;
    let mut degenerate = false;
    let perp = |v: &[f64; 2]| [-v[1], v[0]];
    let dirs = match (norms[0] > cutoff, norms[1] > cutoff) {
        (true, true) => (
            [raw[0][0] / norms[0], raw[0][1] / norms[0]],
            [raw[1][0] / norms[1], raw[1][1] / norms[1]],
        ),
        (true, false) => {
            degenerate = true;
            let d1 = [raw[0][0] / norms[0], raw[0][1] / norms[0]];
            (d1, perp(&d1))
        }
        (false, true) => {
            degenerate = true;
            let d2 = [raw[1][0] / norms[1], raw[1][1] / norms[1]];
            (perp(&d2), d2)
        }
        (false, false) => {
            degenerate = true;
            ([1.0, 0.0], [0.0, 1.0])
        }
    };
    (dirs, norms, degenerate)
}

/// Joint maximization of `⟨B_AB⟩` and `⟨B_AC⟩` with shared Alice
/// observables, for a real three-qubit pure state.
///
/// Alice's directions are common eigenvectors of the two Gram matrices;
/// the split directions are their images under `T_ABᵗ` and `T_ACᵗ`. Both
/// reported values come from explicit evaluation of the CHSH operator on
/// the corresponding marginal, with the identical Alice observables.
pub fn joint_max(psi: &PureState) -> Result<JointMaxResult> {
    if psi.factor_dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(
            "joint_max expects a three-qubit state".into(),
        ));
    }
    let max_im = psi.max_imag();
    if max_im > 1e-12 {
        return Err(Error::ComplexAmplitudes(max_im));
    }

    let rho_ab = pair_marginal(psi, ChshPair::AB)?;
    let rho_ac = pair_marginal(psi, ChshPair::AC)?;
    let t_ab = correlation_matrix(&rho_ab, CorrelationBasis::XZ)?;
    let t_ac = correlation_matrix(&rho_ac, CorrelationBasis::XZ)?;

    let (alice, basis_degenerate) = simultaneous_eigenbasis(&t_ab.gram(), &t_ac.gram())?;
    let (d_dirs, d_norms, d_degenerate) = split_pair(&t_ab, &alice);
    let (e_dirs, e_norms, e_degenerate) = split_pair(&t_ac, &alice);

    let a1 = MeasurementDirection::planar(alice.0[0], alice.0[1])?;
    let a2 = MeasurementDirection::planar(alice.1[0], alice.1[1])?;

    let theta_b = d_norms[1].atan2(d_norms[0]);
    let theta_c = e_norms[1].atan2(e_norms[0]);
    let bob_meas =
        ChshMeasurements::from_split(a1.clone(), a2.clone(), &d_dirs.0, &d_dirs.1, theta_b)?;
    let charlie_meas =
        ChshMeasurements::from_split(a1.clone(), a2.clone(), &e_dirs.0, &e_dirs.1, theta_c)?;

    let value_ab = chsh_value(&rho_ab, &bob_meas)?;
    let value_ac = chsh_value(&rho_ac, &charlie_meas)?;

    Ok(JointMaxResult {
        value_ab,
        value_ac,
        alice_dirs: (a1, a2),
        bob_meas,
        charlie_meas,
        degenerate: basis_degenerate || d_degenerate || e_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::pair_chsh_max;
    use crate::linalg::{expectation, kron_all, partial_trace};
    use crate::observables::{pauli, planar_observable, Pauli};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    const TSIRELSON: f64 = 2.828427124746190;

    #[test]
    fn tight_family_endpoints() {
        let psi0 = tight_family(TightFamilyParameter::new(0.0).unwrap());
        for (idx, expect) in [(2, 0.5), (3, 0.5), (4, 0.5), (5, 0.5)] {
            assert_relative_eq!(psi0.amplitudes()[idx].re, expect, epsilon = 1e-14);
        }

        let psi1 = tight_family(TightFamilyParameter::new(FRAC_PI_4).unwrap());
        let r = 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(psi1.amplitudes()[2].re, 0.0, epsilon = 1e-8);
        assert_relative_eq!(psi1.amplitudes()[4].re, r, epsilon = 1e-12);
        assert_relative_eq!(psi1.amplitudes()[5].re, r, epsilon = 1e-12);
    }

    #[test]
    fn tight_family_is_normalized_for_all_t() {
        for k in 0..=32 {
            let t = FRAC_PI_4 * k as f64 / 32.0;
            let psi = tight_family(TightFamilyParameter::new(t).unwrap());
            let norm: f64 = psi.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert_relative_eq!(norm, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn tight_family_parameter_range() {
        assert!(TightFamilyParameter::new(-0.1).is_err());
        assert!(TightFamilyParameter::new(1.0).is_err());
        assert!(TightFamilyParameter::new(f64::NAN).is_err());
        assert!(TightFamilyParameter::new(FRAC_PI_4).is_ok());
    }

    #[test]
    fn pair_expectations_examples() {
        let zero = PureState::basis_state(&[2, 2, 2], 0).unwrap();
        let e = pair_expectations(&zero).unwrap();
        assert_relative_eq!(e.yy_ab, 0.0, epsilon = 1e-14);
        assert_relative_eq!(e.yy_ac, 0.0, epsilon = 1e-14);
        assert_relative_eq!(e.yy_bc, 0.0, epsilon = 1e-14);

        let e0 = pair_expectations(&tight_family(TightFamilyParameter::new(0.0).unwrap()))
            .unwrap();
        assert_relative_eq!(e0.yy_ab, 1.0, epsilon = 1e-13);
        assert_relative_eq!(e0.yy_ac, 0.0, epsilon = 1e-13);
        assert_relative_eq!(e0.yy_bc, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn pair_expectations_follow_cos2t_along_the_family() {
        for k in 0..=16 {
            let t = FRAC_PI_4 * k as f64 / 16.0;
            let psi = tight_family(TightFamilyParameter::new(t).unwrap());
            let e = pair_expectations(&psi).unwrap();
            // Near t = π/4 the target √(cos 2t) is itself at sqrt precision.
            assert_relative_eq!(e.yy_ab, (2.0 * t).cos().max(0.0).sqrt(), epsilon = 1e-7);
            assert_relative_eq!(e.yy_ac, 0.0, epsilon = 1e-12);
            assert_relative_eq!(e.yy_bc, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn joint_max_traces_the_boundary_circle() {
        for k in 0..=8 {
            let t = FRAC_PI_4 * k as f64 / 8.0;
            let psi = tight_family(TightFamilyParameter::new(t).unwrap());
            let result = joint_max(&psi).unwrap();
            assert_relative_eq!(result.value_ab, TSIRELSON * t.cos(), epsilon = 1e-8);
            assert_relative_eq!(result.value_ac, TSIRELSON * t.sin(), epsilon = 1e-8);
            assert!(result.sum_of_squares() <= 8.0 + 1e-9);
            // Shared Alice observables by construction.
            assert_eq!(
                result.bob_meas.a1.components(),
                result.charlie_meas.a1.components()
            );
            assert_eq!(
                result.bob_meas.a2.components(),
                result.charlie_meas.a2.components()
            );
        }
    }

    /// Grid oracle: maximize `m_AB(α)² + m_AC(α)²` over Alice angle pairs,
    /// where the inner maxima over Bob/Charlie are closed-form.
    fn shared_alice_grid_oracle(psi: &PureState, steps: usize) -> f64 {
        let dims = [2usize, 2, 2];
        let rho = psi.density();
        let rho_ab = partial_trace(&rho, &dims, &[0, 1]).unwrap();
        let rho_ac = partial_trace(&rho, &dims, &[0, 2]).unwrap();
        let x = pauli(Pauli::X);
        let z = pauli(Pauli::Z);
        let pair_value = |rho_pair: &ComplexMatrix, alpha1: f64, alpha2: f64| -> f64 {
            let a1 = planar_observable(alpha1);
            let a2 = planar_observable(alpha2);
            let k1 = a1.matrix() + a2.matrix();
            let k2 = a1.matrix() - a2.matrix();
            let mut total = 0.0;
            for k in [k1, k2] {
                let g = partial_trace(
                    &(&crate::linalg::kron(&k, &pauli(Pauli::I)) * rho_pair),
                    &[2, 2],
                    &[1],
                )
                .unwrap();
                let gx = (&x * &g).trace().re;
                let gz = (&z * &g).trace().re;
                total += (gx * gx + gz * gz).sqrt();
            }
            total
        };
        let mut best: f64 = 0.0;
        for i in 0..steps {
            for j in 0..steps {
                let alpha1 = std::f64::consts::PI * i as f64 / steps as f64;
                let alpha2 = std::f64::consts::PI * j as f64 / steps as f64;
                let v_ab = pair_value(&rho_ab, alpha1, alpha2);
                let v_ac = pair_value(&rho_ac, alpha1, alpha2);
                best = best.max(v_ab * v_ab + v_ac * v_ac);
            }
        }
        best
    }

    #[test]
    fn joint_max_on_product_zero_state() {
        let zero = PureState::basis_state(&[2, 2, 2], 0).unwrap();
        let result = joint_max(&zero).unwrap();
        // Rank-deficient correlation matrices: flagged, but the construction
        // still reaches the full sum of squares 8 (yy_bc = 0).
        assert!(result.degenerate);
        assert_relative_eq!(result.value_ab, 2.0, epsilon = 1e-10);
        assert_relative_eq!(result.value_ac, 2.0, epsilon = 1e-10);
        let oracle = shared_alice_grid_oracle(&zero, 60);
        assert!(result.sum_of_squares() >= oracle - 1e-3);
        assert!(result.sum_of_squares() <= 8.0 + 1e-9);
    }

    #[test]
    fn joint_max_on_ghz_state() {
        let r = 1.0 / 2.0_f64.sqrt();
        let mut amps = vec![0.0; 8];
        amps[0] = r;
        amps[7] = r;
        let ghz = PureState::from_real(vec![2, 2, 2], &amps).unwrap();
        let yy_bc = pair_expectations(&ghz).unwrap().yy_bc;
        let result = joint_max(&ghz).unwrap();
        assert_relative_eq!(
            result.sum_of_squares(),
            8.0 * (1.0 - yy_bc * yy_bc),
            epsilon = 1e-8
        );
        let oracle = shared_alice_grid_oracle(&ghz, 60);
        assert!(result.sum_of_squares() >= oracle - 1e-3);
    }

    #[test]
    fn joint_max_matches_lemma_formula_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(90210);
        let mut degenerate_count = 0;
        for _ in 0..150 {
            let psi = PureState::random_real(&[2, 2, 2], &mut rng);
            let result = joint_max(&psi).unwrap();
            let yy_bc = pair_expectations(&psi).unwrap().yy_bc;
            assert!(result.sum_of_squares() <= 8.0 + 1e-9);
            if result.degenerate {
                degenerate_count += 1;
            } else {
                assert_relative_eq!(
                    result.sum_of_squares(),
                    8.0 * (1.0 - yy_bc * yy_bc),
                    epsilon = 1e-6
                );
            }
            // Shared-Alice values cannot beat the individual pair maxima.
            let cap_ab = pair_chsh_max(&psi, ChshPair::AB).unwrap();
            let cap_ac = pair_chsh_max(&psi, ChshPair::AC).unwrap();
            assert!(result.value_ab <= cap_ab + 1e-9);
            assert!(result.value_ac <= cap_ac + 1e-9);
        }
        // Random real states are generically non-degenerate.
        assert!(degenerate_count == 0, "{} degenerate", degenerate_count);
    }

    #[test]
    fn joint_max_oracle_agreement_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        for _ in 0..5 {
            let psi = PureState::random_real(&[2, 2, 2], &mut rng);
            let result = joint_max(&psi).unwrap();
            let oracle = shared_alice_grid_oracle(&psi, 90);
            // The grid undershoots the optimum; the construction may not.
            assert!(
                result.sum_of_squares() >= oracle - 2e-3,
                "constructed {} vs grid {}",
                result.sum_of_squares(),
                oracle
            );
        }
    }

    #[test]
    fn joint_max_rejects_bad_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let complex = PureState::random_complex(&[2, 2, 2], &mut rng);
        assert!(matches!(
            joint_max(&complex),
            Err(Error::ComplexAmplitudes(_))
        ));
        let two_qubit = PureState::random_real(&[2, 2], &mut rng);
        assert!(joint_max(&two_qubit).is_err());
    }

    #[test]
    fn commutation_defect_examples() {
        let psi = tight_family(TightFamilyParameter::new(0.3).unwrap());
        assert!(commutation_defect(&psi).unwrap() <= 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(345);
        for _ in 0..100 {
            let psi = PureState::random_real(&[2, 2, 2], &mut rng);
            assert!(commutation_defect(&psi).unwrap() <= 1e-10);
        }

        // Complex states need not satisfy the identity; find one that breaks
        // it to mark the hypothesis boundary.
        let mut broken = false;
        for _ in 0..50 {
            let psi = PureState::random_complex(&[2, 2, 2], &mut rng);
            if commutation_defect(&psi).unwrap() > 1e-6 {
                broken = true;
                break;
            }
        }
        assert!(broken, "expected a complex state with nonzero defect");
    }

    #[test]
    fn monogamy_residual_examples() {
        assert_relative_eq!(monogamy_residual(TSIRELSON, 0.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(monogamy_residual(2.0, 2.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(monogamy_residual(2.0, 0.0), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn tight_family_hits_every_boundary_point() {
        // Achievability: (x, y) on the quarter circle is reached within 1e-8.
        for k in 0..=64 {
            let t = FRAC_PI_4 * k as f64 / 64.0;
            let psi = tight_family(TightFamilyParameter::new(t).unwrap());
            let result = joint_max(&psi).unwrap();
            let dx = result.value_ab - TSIRELSON * t.cos();
            let dy = result.value_ac - TSIRELSON * t.sin();
            assert!((dx * dx + dy * dy).sqrt() <= 1e-8, "t = {}", t);
        }
    }

    #[test]
    fn yy_route_consistent_with_explicit_operator() {
        let psi = tight_family(TightFamilyParameter::new(0.2).unwrap());
        let y = pauli(Pauli::Y);
        let id = pauli(Pauli::I);
        let direct = expectation(&psi, &kron_all(&[&y, &y, &id])).unwrap();
        assert_relative_eq!(
            pair_expectations(&psi).unwrap().yy_ab,
            direct,
            epsilon = 1e-14
        );
    }
}
