//! Trade-off between Bell violation and anticommuting local expectations.
//!
//! If `W` has spectrum in `[-1, 1]` and anticommutes with every one of
//! Bob's Bell observables, then `tr(ρB) ≤ Q·√(1 - ⟨W⟩²)` for any quantum
//! bound `Q` of the correlation operator `B`. Specializing `W` to the
//! normalized commutator `i[B₁,B₂]/2` yields local commutator bounds for
//! CHSH, and the squared operator identity gives Tsirelson's relation
//! `⟨B⟩ ≤ √(4 + |⟨[A₁,A₂]⊗[B₁,B₂]⟩|)`.

use crate::chsh::chsh_operator;
use crate::error::{Error, Result};
use crate::linalg::{anticommutator, commutator, expectation_density, kron, ComplexMatrix};
use crate::observables::{commutator_observable, DichotomicObservable};
use crate::seesaw::BellScenario;

/// One evaluated instance of the anticommutation bound.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub bell_value: f64,
    pub witness_expectation: f64,
    /// `Q·√(1 - ⟨W⟩²)`.
    pub bound: f64,
    /// `bound - bell_value`; nonnegative for every valid configuration.
    pub residual: f64,
}

/// True iff `max_j ‖W B_j + B_j W‖_F ≤ tol`.
pub fn anticommutes(
    w: &DichotomicObservable,
    bs: &[DichotomicObservable],
    tol: f64,
) -> Result<bool> {
    Ok(anticommutation_defect(w, bs)? <= tol)
}

fn anticommutation_defect(w: &DichotomicObservable, bs: &[DichotomicObservable]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for b in bs {
        if b.dim() != w.dim() {
            return Err(Error::DimensionMismatch(format!(
                "witness dimension {} vs observable dimension {}",
                w.dim(),
                b.dim()
            )));
        }
        worst = worst.max(anticommutator(w.matrix(), b.matrix()).frobenius_norm());
    }
    Ok(worst)
}

/// Evaluate the anticommutation bound for a two-party correlation operator.
///
/// `q` is a caller-supplied quantum bound for the coefficient matrix
/// (2√2 for CHSH); the witness must anticommute with every Bob observable
/// within `1e-9`. Marginal (identity-slot) coefficients are rejected: the
/// bound is a statement about pure correlation operators.
pub fn witness_bound(
    rho: &ComplexMatrix,
    coefficients: &BellScenario,
    a_obs: &[DichotomicObservable; 2],
    b_obs: &[DichotomicObservable; 2],
    q: f64,
    w: &DichotomicObservable,
) -> Result<WitnessReport> {
    if coefficients.num_parties() != 2 {
        return Err(Error::InvalidScenario(format!(
            "witness bound needs a two-party scenario, got {} parties",
            coefficients.num_parties()
        )));
    }
    if !coefficients.is_correlation_only() {
        return Err(Error::InvalidScenario(
            "witness bound needs a pure correlation operator (no identity terms)".into(),
        ));
    }
    let defect = anticommutation_defect(w, b_obs)?;
    if defect > 1e-9 {
        return Err(Error::NotAnticommuting(defect));
    }
    if a_obs[0].dim() != a_obs[1].dim() || b_obs[0].dim() != b_obs[1].dim() {
        return Err(Error::DimensionMismatch(
            "observable pairs must share a dimension per site".into(),
        ));
    }
    // The coefficient matrix is dimension-agnostic; assemble the operator
    // at the dimensions the observables actually live on.
    let mut bell_op = ComplexMatrix::zeros(a_obs[0].dim() * b_obs[0].dim());
    for i in 1..=2usize {
        for j in 1..=2usize {
            let c = coefficients.coefficient(&[i, j]);
            if c != 0.0 {
                bell_op = &bell_op
                    + &kron(a_obs[i - 1].matrix(), b_obs[j - 1].matrix()).scale_re(c);
            }
        }
    }
    let bell_value = expectation_density(rho, &bell_op)?;
    let witness_full = kron(&ComplexMatrix::identity(a_obs[0].dim()), w.matrix());
    let witness_expectation = expectation_density(rho, &witness_full)?.clamp(-1.0, 1.0);
    let bound = q * (1.0 - witness_expectation * witness_expectation).max(0.0).sqrt();
    Ok(WitnessReport {
        bell_value,
        witness_expectation,
        bound,
        residual: bound - bell_value,
    })
}

/// Commutator-expectation scaling for the local CHSH bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorScaling {
    /// `W = i[B₁,B₂]/2` (spectrum in [-1, 1]): bound `2√2·√(1 - ⟨W⟩²)`.
    /// This is the form the anticommutation theorem licenses.
    Normalized,
    /// Raw commutator expectation `⟨[B₁,B₂]⟩` inside `2√(2 - |·|²)`.
    /// Stronger on paper; not certified here, exposed for comparison only.
    Raw,
}

const TSIRELSON: f64 = 2.828427124746190; // 2√2

/// Residuals of the local commutator bounds for a CHSH configuration:
/// `(bound_from_bob_commutator - ⟨B⟩, bound_from_alice_commutator - ⟨B⟩)`.
pub fn local_commutator_bounds(
    rho: &ComplexMatrix,
    a_obs: &[DichotomicObservable; 2],
    b_obs: &[DichotomicObservable; 2],
) -> Result<(f64, f64)> {
    local_commutator_bounds_scaled(rho, a_obs, b_obs, CommutatorScaling::Normalized)
}

/// Like `local_commutator_bounds`, with an explicit scaling convention.
pub fn local_commutator_bounds_scaled(
    rho: &ComplexMatrix,
    a_obs: &[DichotomicObservable; 2],
    b_obs: &[DichotomicObservable; 2],
    scaling: CommutatorScaling,
) -> Result<(f64, f64)> {
    for obs in a_obs.iter().chain(b_obs) {
        if !obs.projective() {
            return Err(Error::NotProjective(
                "local commutator bounds need projective observables".into(),
            ));
        }
    }
    let bell_op = chsh_operator(&a_obs[0], &a_obs[1], &b_obs[0], &b_obs[1])?;
    let bell_value = expectation_density(rho, &bell_op)?;

    let w_b = commutator_observable(&b_obs[0], &b_obs[1])?;
    let w_a = commutator_observable(&a_obs[0], &a_obs[1])?;
    let id_a = ComplexMatrix::identity(a_obs[0].dim());
    let id_b = ComplexMatrix::identity(b_obs[0].dim());
    let exp_b = expectation_density(rho, &kron(&id_a, w_b.matrix()))?.clamp(-1.0, 1.0);
    let exp_a = expectation_density(rho, &kron(w_a.matrix(), &id_b))?.clamp(-1.0, 1.0);

    let bound = |w: f64| -> f64 {
        match scaling {
            CommutatorScaling::Normalized => TSIRELSON * (1.0 - w * w).max(0.0).sqrt(),
            CommutatorScaling::Raw => 2.0 * (2.0 - 4.0 * w * w).max(0.0).sqrt(),
        }
    };
    Ok((bound(exp_b) - bell_value, bound(exp_a) - bell_value))
}

/// Normalized commutator expectations `(⟨i[A₁,A₂]/2⟩, ⟨i[B₁,B₂]/2⟩)` of a
/// CHSH configuration; both vanish at maximal violation.
pub fn local_commutator_expectations(
    rho: &ComplexMatrix,
    a_obs: &[DichotomicObservable; 2],
    b_obs: &[DichotomicObservable; 2],
) -> Result<(f64, f64)> {
    let w_a = commutator_observable(&a_obs[0], &a_obs[1])?;
    let w_b = commutator_observable(&b_obs[0], &b_obs[1])?;
    let id_a = ComplexMatrix::identity(a_obs[0].dim());
    let id_b = ComplexMatrix::identity(b_obs[0].dim());
    let exp_a = expectation_density(rho, &kron(w_a.matrix(), &id_b))?;
    let exp_b = expectation_density(rho, &kron(&id_a, w_b.matrix()))?;
    Ok((exp_a, exp_b))
}

/// `⟨[A₁,A₂]⊗[B₁,B₂]⟩`: real (product of two anti-Hermitian factors), and
/// equal to ±4 at maximal violation.
pub fn joint_commutator_correlation(
    rho: &ComplexMatrix,
    a_obs: &[DichotomicObservable; 2],
    b_obs: &[DichotomicObservable; 2],
) -> Result<f64> {
    let ka = commutator(a_obs[0].matrix(), a_obs[1].matrix());
    let kb = commutator(b_obs[0].matrix(), b_obs[1].matrix());
    expectation_density(rho, &kron(&ka, &kb))
}

/// Residual of Tsirelson's commutator relation:
/// `√(4 + |⟨[A₁,A₂]⊗[B₁,B₂]⟩|) - ⟨B_AB⟩ ≥ 0` for projective observables.
pub fn tsirelson_commutator_relation(
    rho: &ComplexMatrix,
    a_obs: &[DichotomicObservable; 2],
    b_obs: &[DichotomicObservable; 2],
) -> Result<f64> {
    for obs in a_obs.iter().chain(b_obs) {
        if !obs.projective() {
            return Err(Error::NotProjective(
                "the commutator relation needs projective observables".into(),
            ));
        }
    }
    let bell_op = chsh_operator(&a_obs[0], &a_obs[1], &b_obs[0], &b_obs[1])?;
    let bell_value = expectation_density(rho, &bell_op)?;
    let corr = joint_commutator_correlation(rho, a_obs, b_obs)?;
    Ok((4.0 + corr.abs()).sqrt() - bell_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::singlet;
    use crate::linalg::PureState;
    use crate::observables::{pauli, Pauli};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obs(m: ComplexMatrix) -> DichotomicObservable {
        DichotomicObservable::new(m).unwrap()
    }

    /// Sign-corrected optimal singlet configuration: value +2√2.
    fn singlet_optimal() -> ([DichotomicObservable; 2], [DichotomicObservable; 2]) {
        let r = 1.0 / 2.0_f64.sqrt();
        let z = pauli(Pauli::Z);
        let x = pauli(Pauli::X);
        (
            [obs((&z + &x).scale_re(-r)), obs((&x - &z).scale_re(r))],
            [obs(z.clone()), obs(x.clone())],
        )
    }

    #[test]
    fn anticommutes_examples() {
        let y = obs(pauli(Pauli::Y));
        let z = obs(pauli(Pauli::Z));
        let x = obs(pauli(Pauli::X));
        assert!(anticommutes(&y, &[z.clone(), x.clone()], 1e-10).unwrap());
        assert!(!anticommutes(&z, &[z.clone()], 1e-10).unwrap());
        let zz = obs(kron(&pauli(Pauli::Z), &pauli(Pauli::Z)));
        assert!(anticommutes(&y, &[zz], 1e-10).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let b1 = DichotomicObservable::random_projective(4, &mut rng);
            let b2 = DichotomicObservable::random_projective(4, &mut rng);
            let w = commutator_observable(&b1, &b2).unwrap();
            assert!(anticommutes(&w, &[b1, b2], 1e-9).unwrap());
        }
    }

    #[test]
    fn witness_bound_saturates_on_singlet() {
        let (a, b) = singlet_optimal();
        let w = obs(pauli(Pauli::Y));
        let report = witness_bound(
            &singlet().density(),
            &BellScenario::chsh(),
            &a,
            &b,
            TSIRELSON,
            &w,
        )
        .unwrap();
        assert_relative_eq!(report.bell_value, TSIRELSON, epsilon = 1e-12);
        assert_relative_eq!(report.witness_expectation, 0.0, epsilon = 1e-12);
        assert_relative_eq!(report.bound, TSIRELSON, epsilon = 1e-12);
        assert!(report.residual.abs() <= 1e-10);
    }

    #[test]
    fn witness_bound_on_product_state() {
        let rho = PureState::basis_state(&[2, 2], 0).unwrap().density();
        let a = [obs(pauli(Pauli::Z)), obs(pauli(Pauli::X))];
        let b = [obs(pauli(Pauli::Z)), obs(pauli(Pauli::X))];
        let w = obs(pauli(Pauli::Y));
        let report =
            witness_bound(&rho, &BellScenario::chsh(), &a, &b, TSIRELSON, &w).unwrap();
        assert_relative_eq!(report.witness_expectation, 0.0, epsilon = 1e-12);
        assert!(report.bell_value <= 2.0 + 1e-12);
        assert!(report.residual > 0.0);
    }

    #[test]
    fn witness_eigenstate_forces_zero_bell_value() {
        // |0⟩ ⊗ |+i⟩: Bob's factor is the +1 eigenstate of Y.
        let r = 1.0 / 2.0_f64.sqrt();
        let plus_i = PureState::new(
            vec![2],
            vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)],
        )
        .unwrap();
        let psi = PureState::basis_state(&[2], 0).unwrap().tensor(&plus_i);
        let a = [obs(pauli(Pauli::Z)), obs(pauli(Pauli::X))];
        let b = [obs(pauli(Pauli::Z)), obs(pauli(Pauli::X))];
        let w = obs(pauli(Pauli::Y));
        let report = witness_bound(
            &psi.density(),
            &BellScenario::chsh(),
            &a,
            &b,
            TSIRELSON,
            &w,
        )
        .unwrap();
        assert_relative_eq!(report.witness_expectation, 1.0, epsilon = 1e-12);
        // ⟨W⟩ sits an ulp below 1, so the bound is zero at sqrt precision.
        assert!(report.bound.abs() <= 1e-7, "bound {}", report.bound);
        assert!(report.bell_value.abs() <= 1e-10);
        assert!(report.residual >= -1e-10);
    }

    #[test]
    fn witness_bound_rejects_invalid_inputs() {
        let (a, b) = singlet_optimal();
        let rho = singlet().density();
        // Z does not anticommute with itself.
        let bad_w = obs(pauli(Pauli::Z));
        assert!(matches!(
            witness_bound(&rho, &BellScenario::chsh(), &a, &b, TSIRELSON, &bad_w),
            Err(Error::NotAnticommuting(_))
        ));
        let mut with_marginal = BellScenario::chsh();
        with_marginal.set_coefficient(&[0, 1], 1.0);
        let w = obs(pauli(Pauli::Y));
        assert!(matches!(
            witness_bound(&rho, &with_marginal, &a, &b, TSIRELSON, &w),
            Err(Error::InvalidScenario(_))
        ));
        let three_party = BellScenario::chsh_pair_combination(1.0, 0.0);
        assert!(witness_bound(&rho, &three_party, &a, &b, TSIRELSON, &w).is_err());
    }

    #[test]
    fn local_bounds_saturate_on_singlet() {
        let (a, b) = singlet_optimal();
        let rho = singlet().density();
        let (residual_b, residual_a) = local_commutator_bounds(&rho, &a, &b).unwrap();
        assert!(residual_b.abs() <= 1e-10);
        assert!(residual_a.abs() <= 1e-10);
        let (w_a, w_b) = local_commutator_expectations(&rho, &a, &b).unwrap();
        assert_relative_eq!(w_a, 0.0, epsilon = 1e-12);
        assert_relative_eq!(w_b, 0.0, epsilon = 1e-12);
        assert_relative_eq!(
            joint_commutator_correlation(&rho, &a, &b).unwrap().abs(),
            4.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn equal_bob_observables_leave_classical_value() {
        let rho = singlet().density();
        let a = [obs(pauli(Pauli::Z)), obs(pauli(Pauli::X))];
        let b = [obs(pauli(Pauli::Z)), obs(pauli(Pauli::Z))];
        let (residual_b, _) = local_commutator_bounds(&rho, &a, &b).unwrap();
        let bell_op = chsh_operator(&a[0], &a[1], &b[0], &b[1]).unwrap();
        let bell = expectation_density(&rho, &bell_op).unwrap();
        assert!(bell.abs() <= 2.0 + 1e-12);
        // Commuting pair: zero witness, bound stays at 2√2.
        assert_relative_eq!(residual_b, TSIRELSON - bell, epsilon = 1e-12);
    }

    #[test]
    fn local_bounds_hold_on_random_configurations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1313);
        for _ in 0..500 {
            let psi = PureState::random_complex(&[2, 2], &mut rng);
            let rho = psi.density();
            let a = [
                DichotomicObservable::random_projective(2, &mut rng),
                DichotomicObservable::random_projective(2, &mut rng),
            ];
            let b = [
                DichotomicObservable::random_projective(2, &mut rng),
                DichotomicObservable::random_projective(2, &mut rng),
            ];
            let (rb, ra) = local_commutator_bounds(&rho, &a, &b).unwrap();
            assert!(rb >= -1e-8 && ra >= -1e-8, "residuals {} {}", rb, ra);
            let rt = tsirelson_commutator_relation(&rho, &a, &b).unwrap();
            assert!(rt >= -1e-8, "tsirelson residual {}", rt);
        }
    }

    #[test]
    fn tsirelson_relation_saturates_on_singlet() {
        let (a, b) = singlet_optimal();
        let rho = singlet().density();
        let residual = tsirelson_commutator_relation(&rho, &a, &b).unwrap();
        assert!(residual.abs() <= 1e-10);
    }

    #[test]
    fn commuting_measurements_give_bound_two() {
        // [A₁,A₂] = [B₁,B₂] = 0: the relation reduces to ⟨B⟩ ≤ 2.
        let rho = singlet().density();
        let a = [obs(pauli(Pauli::Z)), obs(pauli(Pauli::Z))];
        let b = [obs(pauli(Pauli::X)), obs(pauli(Pauli::X))];
        let corr = joint_commutator_correlation(&rho, &a, &b).unwrap();
        assert_relative_eq!(corr, 0.0, epsilon = 1e-12);
        let bell_op = chsh_operator(&a[0], &a[1], &b[0], &b[1]).unwrap();
        let bell = expectation_density(&rho, &bell_op).unwrap();
        let residual = tsirelson_commutator_relation(&rho, &a, &b).unwrap();
        assert_relative_eq!(residual, 2.0 - bell, epsilon = 1e-12);
    }

    #[test]
    fn bound_holds_for_mixed_states() {
        // Jensen's step: random mixtures keep the residual nonnegative.
        let mut rng = ChaCha8Rng::seed_from_u64(2121);
        for _ in 0..100 {
            let mut rho = ComplexMatrix::zeros(4);
            let mut weights = [0.0; 3];
            let mut total = 0.0;
            for w in weights.iter_mut() {
                *w = rng.gen::<f64>();
                total += *w;
            }
            for w in weights.iter_mut() {
                *w /= total;
            }
            for &w in &weights {
                let psi = PureState::random_complex(&[2, 2], &mut rng);
                rho = &rho + &psi.density().scale_re(w);
            }
            let a = [
                DichotomicObservable::random_projective(2, &mut rng),
                DichotomicObservable::random_projective(2, &mut rng),
            ];
            let b = [
                DichotomicObservable::random_projective(2, &mut rng),
                DichotomicObservable::random_projective(2, &mut rng),
            ];
            let w = commutator_observable(&b[0], &b[1]).unwrap();
            let report =
                witness_bound(&rho, &BellScenario::chsh(), &a, &b, TSIRELSON, &w).unwrap();
            assert!(report.residual >= -1e-8, "residual {}", report.residual);
        }
    }

    #[test]
    fn raw_scaling_toggle_is_exposed() {
        let (a, b) = singlet_optimal();
        let rho = singlet().density();
        // At the optimum both witnesses vanish, so the two conventions agree.
        let (nb, na) =
            local_commutator_bounds_scaled(&rho, &a, &b, CommutatorScaling::Normalized).unwrap();
        let (rb, ra) = local_commutator_bounds_scaled(&rho, &a, &b, CommutatorScaling::Raw)
            .unwrap();
        assert_relative_eq!(nb, rb, epsilon = 1e-12);
        assert_relative_eq!(na, ra, epsilon = 1e-12);
    }
}
