//! Dense complex linear algebra sized for joint Hilbert spaces up to
//! dimension ~64.
//!
//! Everything is immutable after construction and all operations are pure,
//! so values can be shared across threads freely.

mod eig;
mod state;

pub use eig::{hermitian_eig, EigenDecomposition};
pub use state::PureState;

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::ALGEBRAIC_TOL;

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

/// JSON shape: `{"dim": n, "entries": [[re, im], ...]}` row-major.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<(f64, f64)>,
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            dim: m.dim,
            entries: m.entries.iter().map(|z| (z.re, z.im)).collect(),
        }
    }
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        let entries = r
            .entries
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_entries(r.dim, entries)
    }
}

impl ComplexMatrix {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major entry vector; the length must be `dim²`.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for dimension {}",
                entries.len(),
                dim
            )));
        }
        Ok(Self { dim, entries })
    }

    /// Build from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Diagonal matrix from real diagonal values.
    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Max entrywise deviation from the conjugate transpose.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// True iff `max |M - M†| ≤ tol` entrywise.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Frobenius distance of `U†U` from the identity.
    pub fn unitary_deviation(&self) -> f64 {
        (&(&self.dagger() * self) - &Self::identity(self.dim)).frobenius_norm()
    }

    /// `(M + M†)/2`; cleans sub-tolerance asymmetry before eigensolves.
    pub fn hermitized(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "matrix-vector dimension mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `A ⊕ B` block-diagonal direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.dim + other.dim;
        let mut out = Self::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                out[(self.dim + i, self.dim + j)] = other[(i, j)];
            }
        }
        out
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Haar-like random real orthogonal matrix (Gram-Schmidt on a Gaussian
    /// matrix).
    pub fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let gauss: Vec<Complex64> = (0..dim * dim)
            .map(|_| Complex64::new(rand_normal(rng), 0.0))
            .collect();
        gram_schmidt_columns(dim, gauss)
    }

    /// Haar-like random complex unitary matrix.
    pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let gauss: Vec<Complex64> = (0..dim * dim)
            .map(|_| Complex64::new(rand_normal(rng), rand_normal(rng)))
            .collect();
        gram_schmidt_columns(dim, gauss)
    }
}

fn rand_normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(rand_distr::StandardNormal)
}

fn gram_schmidt_columns(dim: usize, entries: Vec<Complex64>) -> ComplexMatrix {
    let raw = ComplexMatrix { dim, entries };
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|j| raw.column(j)).collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..dim {
                let d = proj * cols[k][i];
                cols[j][i] -= d;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // Gaussian columns are almost surely independent; a degenerate draw
        // falls back to a basis vector.
        if norm < 1e-12 {
            cols[j] = vec![Complex64::new(0.0, 0.0); dim];
            cols[j][j] = Complex64::new(1.0, 0.0);
        } else {
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
    }
    let mut out = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        for i in 0..dim {
            out[(i, j)] = cols[j][i];
        }
    }
    out
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix addition dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix subtraction dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.dim, rhs.dim,
            "matrix multiplication dimension mismatch"
        );
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let d = a * rhs[(k, j)];
                    out[(i, j)] += d;
                }
            }
        }
        out
    }
}

/// Kronecker product: `(a ⊗ b)(i·db+k, j·db+l) = a(i,j)·b(k,l)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, leftmost factor most significant.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    assert!(!factors.is_empty(), "empty Kronecker product");
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = kron(&out, f);
    }
    out
}

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

/// `ab + ba`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) + &(b * a)
}

/// Trace out the tensor factors not listed in `keep`.
///
/// `factor_dims` describes the factorization of `m` (leftmost factor most
/// significant); `keep` must be a nonempty strictly increasing list of
/// factor indices. The trace is preserved: `tr(result) = tr(m)`.
pub fn partial_trace(
    m: &ComplexMatrix,
    factor_dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = factor_dims.iter().product();
    if total != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "factor dims multiply to {} but matrix dimension is {}",
            total,
            m.dim()
        )));
    }
    if keep.is_empty() {
        return Err(Error::DimensionMismatch(
            "keep set must be nonempty".into(),
        ));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || *keep.last().unwrap() >= factor_dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "keep set {:?} is not a strictly increasing subset of 0..{}",
            keep,
            factor_dims.len()
        )));
    }

    let traced: Vec<usize> = (0..factor_dims.len()).filter(|k| !keep.contains(k)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| factor_dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| factor_dims[k]).collect();
    let dk: usize = keep_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // Strides of each factor in the full big-endian index.
    let mut strides = vec![1usize; factor_dims.len()];
    for k in (0..factor_dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * factor_dims[k + 1];
    }

    let compose = |digits: &[usize], positions: &[usize]| -> usize {
        digits
            .iter()
            .zip(positions)
            .map(|(&d, &pos)| d * strides[pos])
            .sum()
    };
    let decode = |mut idx: usize, dims: &[usize]| -> Vec<usize> {
        let mut digits = vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            digits[k] = idx % dims[k];
            idx /= dims[k];
        }
        digits
    };

    let mut out = ComplexMatrix::zeros(dk);
    for row in 0..dk {
        let row_digits = decode(row, &keep_dims);
        let row_base = compose(&row_digits, keep);
        for col in 0..dk {
            let col_digits = decode(col, &keep_dims);
            let col_base = compose(&col_digits, keep);
            let mut sum = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                let t_digits = decode(t, &traced_dims);
                let offset = compose(&t_digits, &traced);
                sum += m[(row_base + offset, col_base + offset)];
            }
            out[(row, col)] = sum;
        }
    }
    Ok(out)
}

/// `⟨ψ|M|ψ⟩` for a Hermitian `m`; the imaginary residue must stay below
/// the algebraic tolerance.
pub fn expectation(state: &PureState, m: &ComplexMatrix) -> Result<f64> {
    if state.dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs matrix dimension {}",
            state.dim(),
            m.dim()
        )));
    }
    let mv = m.apply(state.amplitudes());
    let value: Complex64 = state
        .amplitudes()
        .iter()
        .zip(&mv)
        .map(|(a, b)| a.conj() * b)
        .sum();
    assert!(
        value.im.abs() <= ALGEBRAIC_TOL,
        "imaginary residue {} in expectation value",
        value.im
    );
    Ok(value.re)
}

/// `tr(mρ)` for a Hermitian `m` and a density matrix `rho`.
pub fn expectation_density(rho: &ComplexMatrix, m: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "density dimension {} vs matrix dimension {}",
            rho.dim(),
            m.dim()
        )));
    }
    let mut value = Complex64::new(0.0, 0.0);
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            value += m[(i, j)] * rho[(j, i)];
        }
    }
    assert!(
        value.im.abs() <= ALGEBRAIC_TOL,
        "imaginary residue {} in expectation value",
        value.im
    );
    Ok(value.re)
}
