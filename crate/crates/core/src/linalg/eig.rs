//! Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Small dense matrices only (dims ≤ ~64). Each sweep annihilates every
//! off-diagonal entry once with a complex plane rotation; the process
//! converges quadratically once the off-diagonal mass is small.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerances::{HERMITIAN_TOL, JACOBI_REL_TOL};

const MAX_SWEEPS: usize = 64;

/// Result of `hermitian_eig`: ascending eigenvalues and a column-orthonormal
/// eigenvector matrix `V` with `H = V Λ V†`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Column `j` of the eigenvector matrix.
    pub fn eigenvector(&self, j: usize) -> Vec<Complex64> {
        self.eigenvectors.column(j)
    }

    /// Rebuild `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambda = ComplexMatrix::diagonal(&self.eigenvalues);
        &(&self.eigenvectors * &lambda) * &self.eigenvectors.dagger()
    }
}

/// Frobenius norm of the strictly off-diagonal part.
fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must pass the entrywise Hermiticity check; it is symmetrized
/// before iterating so the residual asymmetry cannot accumulate. Sweeps stop
/// once the off-diagonal norm falls below `JACOBI_REL_TOL · ‖h‖_F`.
/// Eigenvalues are returned ascending; each eigenvector's phase is fixed so
/// its first significant component is positive real, which makes the
/// decomposition deterministic for test purposes.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let dev = h.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = h.dim();
    let mut a = h.hermitized();
    let mut v = ComplexMatrix::identity(n);
    let target = (JACOBI_REL_TOL * h.frobenius_norm()).max(f64::MIN_POSITIVE);

    let mut converged = n <= 1;
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    // Ascending eigenvalue order, stable under ties.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        eigenvalues.push(diag[old_col]);
        let mut col = v.column(old_col);
        fix_phase(&mut col);
        for i in 0..n {
            eigenvectors[(i, new_col)] = col[i];
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Multiply the column by a phase making its first significant component
/// positive real.
fn fix_phase(col: &mut [Complex64]) {
    let pivot = col.iter().find(|z| z.norm() > 1e-8);
    if let Some(&z) = pivot {
        let phase = z.conj() / z.norm();
        for c in col.iter_mut() {
            *c *= phase;
        }
    }
}

/// Annihilate `a[(p,q)]` with the unitary plane rotation
/// `J[p,p]=c, J[p,q]=s·e^{iφ}, J[q,p]=-s·e^{-iφ}, J[q,q]=c`,
/// where `e^{iφ}` is the phase of `a[(p,q)]`; updates `a ← J†aJ`, `v ← vJ`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let gamma = apq.norm();
    if gamma == 0.0 {
        return;
    }
    let phase = apq / gamma;
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;

    // tan of the rotation angle: smaller root of t² + 2θt - 1 = 0.
    let theta = (beta - alpha) / (2.0 * gamma);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = a.dim();
    // Right multiplication: columns p and q of a.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * s * phase.conj();
        a[(k, q)] = akp * s * phase + akq * c;
    }
    // Left multiplication by J†: rows p and q.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * s * phase;
        a[(q, k)] = apk * s * phase.conj() + aqk * c;
    }
    // The rotation zeroes the pivot and keeps the diagonal real.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s * phase.conj();
        v[(k, q)] = vkp * s * phase + vkq * c;
    }
}
