//! Pure states over an ordered tensor factorization.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerances::NORM_TOL;

/// Normalized amplitude vector over an ordered tensor factorization.
///
/// The leftmost factor is the most significant: for three qubits the basis
/// index of `|abc⟩` is `4a + 2b + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct PureState {
    factor_dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

/// JSON shape: `{"factor_dims": [...], "amplitudes": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct StateRepr {
    factor_dims: Vec<usize>,
    amplitudes: Vec<(f64, f64)>,
}

impl From<PureState> for StateRepr {
    fn from(s: PureState) -> Self {
        StateRepr {
            factor_dims: s.factor_dims,
            amplitudes: s.amplitudes.iter().map(|z| (z.re, z.im)).collect(),
        }
    }
}

impl TryFrom<StateRepr> for PureState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        PureState::new(
            r.factor_dims,
            r.amplitudes
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl PureState {
    /// Build a state; the amplitude count must match the factorization and
    /// the vector must be normalized within `NORM_TOL`.
    pub fn new(factor_dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let total: usize = factor_dims.iter().product();
        if total != amplitudes.len() || factor_dims.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "factor dims {:?} for {} amplitudes",
                factor_dims,
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            factor_dims,
            amplitudes,
        })
    }

    /// Normalize an arbitrary nonzero amplitude vector.
    pub fn from_unnormalized(factor_dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-300 {
            return Err(Error::NotNormalized(norm));
        }
        let scaled = amplitudes.iter().map(|z| z / norm).collect();
        Self::new(factor_dims, scaled)
    }

    /// Real amplitude vector, normalized.
    pub fn from_real(factor_dims: Vec<usize>, amplitudes: &[f64]) -> Result<Self> {
        Self::from_unnormalized(
            factor_dims,
            amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(factor_dims: &[usize], index: usize) -> Result<Self> {
        let total: usize = factor_dims.iter().product();
        if index >= total {
            return Err(Error::OutOfRange(format!(
                "basis index {} for dimension {}",
                index, total
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); total];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(factor_dims.to_vec(), amplitudes)
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Largest imaginary part among the amplitudes.
    pub fn max_imag(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    /// Density matrix `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut rho = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                rho[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        rho
    }

    /// Tensor product `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(&other.factor_dims);
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        PureState {
            factor_dims: dims,
            amplitudes: amps,
        }
    }

    /// Reorder tensor factors; new factor `j` is the old factor `perm[j]`.
    pub fn permute_factors(&self, perm: &[usize]) -> Result<PureState> {
        let f = self.factor_dims.len();
        let mut seen = vec![false; f];
        if perm.len() != f || perm.iter().any(|&p| p >= f || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::DimensionMismatch(format!(
                "{:?} is not a permutation of 0..{}",
                perm, f
            )));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.factor_dims[p]).collect();
        let mut strides = vec![1usize; f];
        for k in (0..f.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factor_dims[k + 1];
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        let mut digits = vec![0usize; f];
        for (new_idx, amp) in amps.iter_mut().enumerate() {
            let mut rem = new_idx;
            for k in (0..f).rev() {
                digits[k] = rem % new_dims[k];
                rem /= new_dims[k];
            }
            let old_idx: usize = digits
                .iter()
                .zip(perm)
                .map(|(&d, &p)| d * strides[p])
                .sum();
            *amp = self.amplitudes[old_idx];
        }
        Ok(PureState {
            factor_dims: new_dims,
            amplitudes: amps,
        })
    }

    /// Random real state: standard normal amplitudes, normalized. Rotation
    /// invariant on the real sphere.
    pub fn random_real<R: Rng>(factor_dims: &[usize], rng: &mut R) -> PureState {
        let total: usize = factor_dims.iter().product();
        loop {
            let amps: Vec<f64> = (0..total)
                .map(|_| rng.sample(rand_distr::StandardNormal))
                .collect();
            if let Ok(state) = Self::from_real(factor_dims.to_vec(), &amps) {
                return state;
            }
        }
    }

    /// Random complex state, Haar-distributed.
    pub fn random_complex<R: Rng>(factor_dims: &[usize], rng: &mut R) -> PureState {
        let total: usize = factor_dims.iter().product();
        loop {
            let amps: Vec<Complex64> = (0..total)
                .map(|_| {
                    Complex64::new(
                        rng.sample(rand_distr::StandardNormal),
                        rng.sample(rand_distr::StandardNormal),
                    )
                })
                .collect();
            if let Ok(state) = Self::from_unnormalized(factor_dims.to_vec(), amps) {
                return state;
            }
        }
    }
}
