//! Dichotomic observables and the Pauli/planar families.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{commutator, hermitian_eig, ComplexMatrix};
use crate::tolerances::{HERMITIAN_TOL, NORM_TOL, PROJECTIVE_TOL};

/// The four Pauli names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" => Ok(Pauli::I),
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::UnknownPauli(other.to_string())),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(name)
    }
}

/// The standard 2×2 Pauli matrix; `Y = [[0, -i], [i, 0]]`.
pub fn pauli(p: Pauli) -> ComplexMatrix {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match p {
        Pauli::I => vec![one, zero, zero, one],
        Pauli::X => vec![zero, one, one, zero],
        Pauli::Y => vec![zero, -i, i, zero],
        Pauli::Z => vec![one, zero, zero, -one],
    };
    ComplexMatrix::from_entries(2, entries).expect("2x2 Pauli entries")
}

/// Unit vector in the measurement plane: `(x, z)`, or `(x, y, z)` with a
/// Y component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDirection {
    components: Vec<f64>,
}

impl MeasurementDirection {
    pub fn new(components: &[f64]) -> Result<Self> {
        if components.len() != 2 && components.len() != 3 {
            return Err(Error::DimensionMismatch(format!(
                "direction must have 2 or 3 components, got {}",
                components.len()
            )));
        }
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotUnitVector(norm));
        }
        Ok(Self {
            components: components.to_vec(),
        })
    }

    /// Planar direction `(x, z)`, normalizing away rounding in the inputs.
    pub fn planar(x: f64, z: f64) -> Result<Self> {
        let norm = (x * x + z * z).sqrt();
        if norm < 1e-300 {
            return Err(Error::NotUnitVector(norm));
        }
        Self::new(&[x / norm, z / norm])
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn dot(&self, other: &MeasurementDirection) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Hermitian matrix with spectrum in `[-1, +1]`.
///
/// Projectivity (spectrum exactly ±1) is certified numerically at
/// construction rather than trusted from the caller; the canonicalization
/// machinery only accepts certified-projective inputs.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomicObservable {
    matrix: ComplexMatrix,
    projective: bool,
}

impl DichotomicObservable {
    /// Validate Hermiticity and the spectral window, and certify the
    /// projective flag (every eigenvalue within `PROJECTIVE_TOL` of ±1).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let eig = hermitian_eig(&matrix)?;
        for &lambda in &eig.eigenvalues {
            if lambda.abs() > 1.0 + 1e-10 {
                return Err(Error::SpectrumOutOfRange(lambda));
            }
        }
        let projective = eig
            .eigenvalues
            .iter()
            .all(|l| (l.abs() - 1.0).abs() <= PROJECTIVE_TOL);
        Ok(Self { matrix, projective })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// True iff the spectrum is exactly ±1 (within certification tolerance).
    pub fn projective(&self) -> bool {
        self.projective
    }

    /// Random projective observable: Haar-like eigenbasis with uniform ±1
    /// signs.
    pub fn random_projective<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let basis = ComplexMatrix::random_unitary(dim, rng);
        let signs: Vec<f64> = (0..dim)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let m = &(&basis * &ComplexMatrix::diagonal(&signs)) * &basis.dagger();
        Self::new(m.hermitized()).expect("sign spectrum is projective")
    }
}

/// `cos θ · Z + sin θ · X`: real, traceless, projective.
pub fn planar_observable(theta: f64) -> DichotomicObservable {
    let m = &pauli(Pauli::Z).scale_re(theta.cos()) + &pauli(Pauli::X).scale_re(theta.sin());
    DichotomicObservable::new(m).expect("planar observables are projective")
}

/// `d · σ` with `σ = (X, Z)` for planar directions and `(X, Y, Z)` for
/// spatial ones.
pub fn direction_observable(d: &MeasurementDirection) -> DichotomicObservable {
    let c = d.components();
    let m = match c.len() {
        2 => &pauli(Pauli::X).scale_re(c[0]) + &pauli(Pauli::Z).scale_re(c[1]),
        _ => {
            &(&pauli(Pauli::X).scale_re(c[0]) + &pauli(Pauli::Y).scale_re(c[1]))
                + &pauli(Pauli::Z).scale_re(c[2])
        }
    };
    DichotomicObservable::new(m).expect("unit direction observables are projective")
}

/// The normalized commutator `i[b1, b2]/2`.
///
/// For projective inputs this is Hermitian with spectrum in `[-1, 1]` and
/// anticommutes with both inputs, which makes it the canonical witness for
/// the Bell-violation trade-off.
pub fn commutator_observable(
    b1: &DichotomicObservable,
    b2: &DichotomicObservable,
) -> Result<DichotomicObservable> {
    if b1.dim() != b2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observable dimensions {} vs {}",
            b1.dim(),
            b2.dim()
        )));
    }
    if !b1.projective() || !b2.projective() {
        return Err(Error::NotProjective(
            "commutator witness requires projective inputs".into(),
        ));
    }
    let m = commutator(b1.matrix(), b2.matrix()).scale(Complex64::new(0.0, 0.5));
    DichotomicObservable::new(m.hermitized())
}
