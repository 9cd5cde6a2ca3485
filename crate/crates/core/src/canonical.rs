//! Canonical form for a pair of ±1 observables.
//!
//! Any two projective, traceless observables on a 2d-dimensional space can
//! be rotated by a single unitary into simultaneous 2×2 blocks: the first
//! becomes `⊕ Z` and the second `⊕ (cos θ_j Z + sin θ_j X)`. The angles
//! `θ_j` are a complete invariant of the pair, and the construction is what
//! reduces every two-measurement Bell problem to qubits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::observables::DichotomicObservable;
use crate::tolerances::{CANONICAL_TOL, RANK_TOL};

/// A unitary `U` and angles `θ_1..θ_d` in `[0, π]` with
/// `U M₁ U† = ⊕ Z` and `U M₂ U† = ⊕ (cos θ_j Z + sin θ_j X)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanonicalForm {
    basis_change: ComplexMatrix,
    angles: Vec<f64>,
}

impl CanonicalForm {
    pub fn basis_change(&self) -> &ComplexMatrix {
        &self.basis_change
    }

    /// Block angles, sorted ascending in `[0, π]`.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Frobenius distance of `U†U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        self.basis_change.unitary_deviation()
    }

    /// Frobenius errors of `U m U†` against the two block targets.
    pub fn reconstruction_errors(&self, m1: &ComplexMatrix, m2: &ComplexMatrix) -> (f64, f64) {
        let (t1, t2) = assemble_blocks(&self.angles);
        let u = &self.basis_change;
        let ud = u.dagger();
        let r1 = (&(&(u * m1) * &ud) - &t1).frobenius_norm();
        let r2 = (&(&(u * m2) * &ud) - &t2).frobenius_norm();
        (r1, r2)
    }

    /// True iff both reconstructions and the unitarity check hold at the
    /// canonical tolerance.
    pub fn verify(&self, m1: &ComplexMatrix, m2: &ComplexMatrix) -> bool {
        let (r1, r2) = self.reconstruction_errors(m1, m2);
        r1 <= CANONICAL_TOL && r2 <= CANONICAL_TOL && self.unitarity_error() <= 1e-10
    }
}

/// Direct-sum matrices `(⊕ Z, ⊕ (cos θ_j Z + sin θ_j X))` for the given
/// angles: real, traceless, projective.
pub fn assemble_blocks(angles: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let d = angles.len();
    let mut m1 = ComplexMatrix::zeros(2 * d);
    let mut m2 = ComplexMatrix::zeros(2 * d);
    for (j, &theta) in angles.iter().enumerate() {
        let (i0, i1) = (2 * j, 2 * j + 1);
        m1[(i0, i0)] = Complex64::new(1.0, 0.0);
        m1[(i1, i1)] = Complex64::new(-1.0, 0.0);
        m2[(i0, i0)] = Complex64::new(theta.cos(), 0.0);
        m2[(i1, i1)] = Complex64::new(-theta.cos(), 0.0);
        m2[(i0, i1)] = Complex64::new(theta.sin(), 0.0);
        m2[(i1, i0)] = Complex64::new(theta.sin(), 0.0);
    }
    (m1, m2)
}

/// Extend a pair of projective observables to a common even dimension on
/// which both are traceless (±1 eigenspaces of equal size).
///
/// Each observable is first padded with the opposite eigenvalue until its
/// trace vanishes, then both are padded with `Z` blocks to the larger
/// dimension. The originals sit in the leading block. Already balanced
/// pairs are returned unchanged.
pub fn balance_pair(
    m1: &DichotomicObservable,
    m2: &DichotomicObservable,
) -> Result<(DichotomicObservable, DichotomicObservable)> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observable dimensions {} vs {}",
            m1.dim(),
            m2.dim()
        )));
    }
    for m in [m1, m2] {
        if !m.projective() {
            return Err(Error::NotProjective(
                "balance_pair requires projective observables".into(),
            ));
        }
    }
    let t1 = pad_traceless(m1.matrix());
    let t2 = pad_traceless(m2.matrix());
    let common = t1.dim().max(t2.dim());
    let p1 = pad_with_z_blocks(t1, common);
    let p2 = pad_with_z_blocks(t2, common);
    Ok((
        DichotomicObservable::new(p1)?,
        DichotomicObservable::new(p2)?,
    ))
}

/// Append `∓1` eigen-blocks until the trace vanishes.
fn pad_traceless(m: &ComplexMatrix) -> ComplexMatrix {
    let excess = m.trace().re.round() as i64;
    if excess == 0 {
        return m.clone();
    }
    let pad_value = if excess > 0 { -1.0 } else { 1.0 };
    let pad = ComplexMatrix::diagonal(&vec![pad_value; excess.unsigned_abs() as usize]);
    m.direct_sum(&pad)
}

/// Append `diag(1, -1)` blocks up to the target dimension.
fn pad_with_z_blocks(m: ComplexMatrix, target: usize) -> ComplexMatrix {
    if m.dim() == target {
        return m;
    }
    let extra = target - m.dim();
    let signs: Vec<f64> = (0..extra).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
    m.direct_sum(&ComplexMatrix::diagonal(&signs))
}

/// Simultaneously block-diagonalize a balanced pair.
///
/// Steps: rotate `m1` to `diag(I_d, -I_d)`; take an orthonormal basis `P`
/// of the +1 eigenspace of the rotated `m2`; split `P` into top and bottom
/// halves `P₁, P₂`; diagonalize `P₁†P₁` (which also diagonalizes
/// `P₂†P₂ = I - P₁†P₁`); normalize the columns of `P₁Q` and `P₂Q` into
/// unitaries on the two eigenblocks, completing by Gram-Schmidt where a
/// singular value vanishes; finally interleave the two halves into 2×2
/// blocks and sort them by angle.
pub fn canonicalize_pair(
    m1: &DichotomicObservable,
    m2: &DichotomicObservable,
) -> Result<CanonicalForm> {
    let n = m1.dim();
    if m2.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "observable dimensions {} vs {}",
            n,
            m2.dim()
        )));
    }
    if n % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "canonical form needs even dimension, got {}",
            n
        )));
    }
    for m in [m1, m2] {
        if !m.projective() {
            return Err(Error::NotProjective(
                "canonicalization requires projective observables".into(),
            ));
        }
        if m.matrix().trace().norm() > 1e-9 * n as f64 {
            return Err(Error::NotProjective(
                "canonicalization requires traceless observables".into(),
            ));
        }
    }
    let d = n / 2;

    // Step 1: order the m1 eigenbasis as (+1 block, -1 block).
    let e1 = hermitian_eig(m1.matrix())?;
    let mut w = ComplexMatrix::zeros(n);
    for col in 0..d {
        // Ascending eigenvalues: the +1 eigenvectors are the last d columns.
        for row in 0..n {
            w[(row, col)] = e1.eigenvectors[(row, d + col)];
            w[(row, d + col)] = e1.eigenvectors[(row, col)];
        }
    }
    let u0 = w.dagger();
    let m2_rot = &(&u0 * m2.matrix()) * &w;

    // Step 2: orthonormal columns spanning the +1 eigenspace of rotated m2.
    let e2 = hermitian_eig(&m2_rot.hermitized())?;
    let plus_cols: Vec<usize> = (0..n).filter(|&j| e2.eigenvalues[j] > 0.0).collect();
    if plus_cols.len() != d {
        return Err(Error::NotProjective(format!(
            "+1 eigenspace has dimension {} instead of {}",
            plus_cols.len(),
            d
        )));
    }

    // Steps 3-4: split and diagonalize P₁†P₁.
    let mut p1 = ComplexMatrix::zeros(d);
    let mut p2 = ComplexMatrix::zeros(d);
    for (col, &src) in plus_cols.iter().enumerate() {
        for row in 0..d {
            p1[(row, col)] = e2.eigenvectors[(row, src)];
            p2[(row, col)] = e2.eigenvectors[(d + row, src)];
        }
    }
    let gram = (&p1.dagger() * &p1).hermitized();
    let e3 = hermitian_eig(&gram)?;
    let q = &e3.eigenvectors;

    // Step 5: unitaries from the normalized columns of P₁Q and P₂Q.
    let y1 = &p1 * q;
    let y2 = &p2 * q;
    let u1_dag = normalized_or_completed(&y1)?;
    let u2_dag = normalized_or_completed(&y2)?;

    // Angles from the realized singular values: cos θ_j = 2d₁_j² - 1,
    // sin θ_j = 2d₁_j·d₂_j. atan2 keeps the endpoint angles (where acos of
    // the eigenvalue loses half the significant digits) consistent with
    // the actual block entries.
    let column_norm = |m: &ComplexMatrix, j: usize| -> f64 {
        m.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    };
    let mut angles: Vec<f64> = (0..d)
        .map(|j| {
            let d1 = column_norm(&y1, j);
            let d2 = column_norm(&y2, j);
            (2.0 * d1 * d2).atan2(2.0 * d1 * d1 - 1.0)
        })
        .collect();

    // Step 6: conjugate by U₁⊕U₂, interleave into 2×2 blocks sorted by angle.
    let block_rotation = u1_dag.dagger().direct_sum(&u2_dag.dagger());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| angles[i].partial_cmp(&angles[j]).unwrap());
    let mut permutation = ComplexMatrix::zeros(n);
    for (block, &src) in order.iter().enumerate() {
        permutation[(2 * block, src)] = Complex64::new(1.0, 0.0);
        permutation[(2 * block + 1, d + src)] = Complex64::new(1.0, 0.0);
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let basis_change = &(&permutation * &block_rotation) * &u0;
    Ok(CanonicalForm {
        basis_change,
        angles,
    })
}

/// Normalize the columns of `y` into a unitary factor.
///
/// Columns are orthonormalized in descending-norm order, so a tiny (but
/// above-tolerance) singular value cannot spoil the orthogonality carried
/// by the dominant columns. Columns below the rank tolerance (vanishing
/// singular values, where the factor is not unique) are completed by
/// Gram-Schmidt against the rest.
fn normalized_or_completed(y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = y.dim();
    let mut cols: Vec<Option<Vec<Complex64>>> = vec![None; d];
    let mut order: Vec<usize> = (0..d).collect();
    let norms: Vec<f64> = (0..d)
        .map(|j| y.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    for &j in &order {
        if norms[j] <= RANK_TOL {
            continue;
        }
        let mut col = y.column(j);
        for chosen in cols.iter().flatten() {
            let proj: Complex64 = (0..d).map(|i| chosen[i].conj() * col[i]).sum();
            for i in 0..d {
                let delta = proj * chosen[i];
                col[i] -= delta;
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= RANK_TOL {
            continue; // fully absorbed by earlier columns; complete below
        }
        cols[j] = Some(col.iter().map(|z| z / norm).collect());
    }
    for j in 0..d {
        if cols[j].is_some() {
            continue;
        }
        // Deterministic completion: the basis vector with the largest
        // residual after orthogonalization against the chosen columns.
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for candidate in 0..d {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[candidate] = Complex64::new(1.0, 0.0);
            for chosen in cols.iter().flatten() {
                let proj: Complex64 = (0..d).map(|i| chosen[i].conj() * v[i]).sum();
                for i in 0..d {
                    let delta = proj * chosen[i];
                    v[i] -= delta;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().map_or(true, |(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("nonempty candidate set");
        if norm <= RANK_TOL {
            return Err(Error::InvariantViolation(
                "failed to complete a unitary factor".into(),
            ));
        }
        cols[j] = Some(v.iter().map(|z| z / norm).collect());
    }
    let mut out = ComplexMatrix::zeros(d);
    for (j, col) in cols.iter().enumerate() {
        let col = col.as_ref().expect("all columns filled");
        for i in 0..d {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::observables::{pauli, Pauli};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn obs(m: ComplexMatrix) -> DichotomicObservable {
        DichotomicObservable::new(m).unwrap()
    }

    fn assert_mat_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        assert!(
            (a - b).max_abs() <= tol,
            "matrices differ by {}",
            (a - b).max_abs()
        );
    }

    #[test]
    fn assemble_block_examples() {
        let (m1, m2) = assemble_blocks(&[FRAC_PI_2]);
        assert_mat_close(&m1, &pauli(Pauli::Z), 1e-15);
        assert_mat_close(&m2, &pauli(Pauli::X), 1e-15);

        let (m1, m2) = assemble_blocks(&[0.0, PI]);
        let z = pauli(Pauli::Z);
        assert_mat_close(&m1, &z.direct_sum(&z), 1e-15);
        assert_mat_close(&m2, &z.direct_sum(&-&z), 1e-15);

        let (_, m2) = assemble_blocks(&[FRAC_PI_3]);
        let expected =
            &pauli(Pauli::Z).scale_re(0.5) + &pauli(Pauli::X).scale_re(3.0_f64.sqrt() / 2.0);
        assert_mat_close(&m2, &expected, 1e-15);
    }

    #[test]
    fn assembled_blocks_are_projective_and_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let d = 1 + rng.gen_range(0..4);
            let angles: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * PI).collect();
            let (m1, m2) = assemble_blocks(&angles);
            for m in [&m1, &m2] {
                assert!(m.trace().norm() < 1e-12);
                assert!(obs(m.clone()).projective());
                assert!(m.entries().iter().all(|z| z.im == 0.0));
            }
        }
    }

    #[test]
    fn balance_leaves_balanced_pairs_unchanged() {
        let (z, x) = (obs(pauli(Pauli::Z)), obs(pauli(Pauli::X)));
        let (b1, b2) = balance_pair(&z, &x).unwrap();
        assert_mat_close(b1.matrix(), z.matrix(), 0.0);
        assert_mat_close(b2.matrix(), x.matrix(), 0.0);

        let zi = obs(kron(&pauli(Pauli::Z), &pauli(Pauli::I)));
        let xx = obs(kron(&pauli(Pauli::X), &pauli(Pauli::X)));
        let (b1, b2) = balance_pair(&zi, &xx).unwrap();
        assert_eq!(b1.dim(), 4);
        assert_mat_close(b1.matrix(), zi.matrix(), 0.0);
        assert_mat_close(b2.matrix(), xx.matrix(), 0.0);
    }

    #[test]
    fn balance_pads_a_pure_projector_observable() {
        // diag(1, 1) has trace 2: padded to dimension 4 with a -1 block.
        let plus = obs(ComplexMatrix::diagonal(&[1.0, 1.0]));
        let z = obs(pauli(Pauli::Z));
        let (b1, b2) = balance_pair(&plus, &z).unwrap();
        assert_eq!(b1.dim(), 4);
        assert_eq!(b2.dim(), 4);
        for b in [&b1, &b2] {
            assert!(b.matrix().trace().norm() < 1e-12);
            assert!(b.projective());
        }
        // Originals embedded as leading blocks.
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(b1.matrix()[(i, j)], plus.matrix()[(i, j)]);
                assert_eq!(b2.matrix()[(i, j)], z.matrix()[(i, j)]);
            }
        }
        let spectrum = crate::linalg::hermitian_eig(b1.matrix()).unwrap().eigenvalues;
        assert_relative_eq!(spectrum[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(spectrum[3], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn canonicalize_z_x_pair() {
        let form = canonicalize_pair(&obs(pauli(Pauli::Z)), &obs(pauli(Pauli::X))).unwrap();
        assert_eq!(form.angles().len(), 1);
        assert_relative_eq!(form.angles()[0], FRAC_PI_2, epsilon = 1e-12);
        assert!(form.verify(&pauli(Pauli::Z), &pauli(Pauli::X)));
    }

    #[test]
    fn canonicalize_identical_observables() {
        let form = canonicalize_pair(&obs(pauli(Pauli::Z)), &obs(pauli(Pauli::Z))).unwrap();
        assert_eq!(form.angles().len(), 1);
        assert_relative_eq!(form.angles()[0], 0.0, epsilon = 1e-12);
        assert!(form.verify(&pauli(Pauli::Z), &pauli(Pauli::Z)));
    }

    #[test]
    fn canonicalize_zi_xx_pair() {
        let zi = obs(kron(&pauli(Pauli::Z), &pauli(Pauli::I)));
        let xx = obs(kron(&pauli(Pauli::X), &pauli(Pauli::X)));
        let form = canonicalize_pair(&zi, &xx).unwrap();
        assert_eq!(form.angles().len(), 2);
        assert_relative_eq!(form.angles()[0], FRAC_PI_2, epsilon = 1e-10);
        assert_relative_eq!(form.angles()[1], FRAC_PI_2, epsilon = 1e-10);
        assert!(form.verify(zi.matrix(), xx.matrix()));
    }

    #[test]
    fn canonicalize_rejects_invalid_inputs() {
        let z = obs(pauli(Pauli::Z));
        let zi = obs(kron(&pauli(Pauli::Z), &pauli(Pauli::I)));
        assert!(canonicalize_pair(&z, &zi).is_err());
        let plus = obs(ComplexMatrix::diagonal(&[1.0, 1.0]));
        assert!(matches!(
            canonicalize_pair(&plus, &z),
            Err(Error::NotProjective(_))
        ));
        let half = obs(pauli(Pauli::Z).scale_re(0.5));
        assert!(canonicalize_pair(&half, &z).is_err());
        let odd = obs(ComplexMatrix::diagonal(&[1.0, -1.0, 1.0]));
        assert!(canonicalize_pair(&odd, &odd).is_err());
    }

    #[test]
    fn round_trip_recovers_angle_multisets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for trial in 0..60 {
            let d = 1 + trial % 4;
            let angles: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * PI).collect();
            let (b1, b2) = assemble_blocks(&angles);
            let u = ComplexMatrix::random_unitary(2 * d, &mut rng);
            let ud = u.dagger();
            let m1 = obs((&(&u * &b1) * &ud).hermitized());
            let m2 = obs((&(&u * &b2) * &ud).hermitized());
            let form = canonicalize_pair(&m1, &m2).unwrap();

            let mut expected = angles.clone();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (got, want) in form.angles().iter().zip(&expected) {
                assert!(
                    (got - want).abs() <= 1e-8,
                    "trial {}: angle {} vs {}",
                    trial,
                    got,
                    want
                );
            }
            let (r1, r2) = form.reconstruction_errors(m1.matrix(), m2.matrix());
            assert!(r1 <= CANONICAL_TOL && r2 <= CANONICAL_TOL, "trial {}", trial);
            assert!(form.unitarity_error() <= 1e-10);
        }
    }

    #[test]
    fn canonical_blocks_are_real_and_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let angles: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * PI).collect();
        let (b1, b2) = assemble_blocks(&angles);
        let u = ComplexMatrix::random_unitary(6, &mut rng);
        let ud = u.dagger();
        let m1 = obs((&(&u * &b1) * &ud).hermitized());
        let m2 = obs((&(&u * &b2) * &ud).hermitized());
        let form = canonicalize_pair(&m1, &m2).unwrap();
        let g = form.basis_change();
        let rotated = &(g * m2.matrix()) * &g.dagger();
        for block in 0..3 {
            let (i0, i1) = (2 * block, 2 * block + 1);
            let trace = rotated[(i0, i0)] + rotated[(i1, i1)];
            assert!(trace.norm() < 1e-9);
            for &(r, c) in &[(i0, i0), (i0, i1), (i1, i0), (i1, i1)] {
                assert!(rotated[(r, c)].im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn degenerate_endpoint_angles_round_trip() {
        // θ ∈ {0, π} makes D₁ or D₂ vanish and exercises the Gram-Schmidt
        // completion path.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let angles = vec![0.0, PI, FRAC_PI_3];
        let (b1, b2) = assemble_blocks(&angles);
        let u = ComplexMatrix::random_unitary(6, &mut rng);
        let ud = u.dagger();
        let m1 = obs((&(&u * &b1) * &ud).hermitized());
        let m2 = obs((&(&u * &b2) * &ud).hermitized());
        let form = canonicalize_pair(&m1, &m2).unwrap();
        assert!(form.verify(m1.matrix(), m2.matrix()));
        assert_relative_eq!(form.angles()[0], 0.0, epsilon = 1e-7);
        assert_relative_eq!(form.angles()[1], FRAC_PI_3, epsilon = 1e-8);
        assert_relative_eq!(form.angles()[2], PI, epsilon = 1e-7);
    }
}
