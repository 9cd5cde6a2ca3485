//! Python bindings for the CHSH-monogamy toolkit.
//!
//! Exposes the dense-matrix and pure-state carriers plus the headline
//! operations: Pauli/planar observables, CHSH assembly, correlation-matrix
//! maximization, the boundary state family, joint maximization, the
//! canonical block form, and the see-saw oracle. Build the shared library
//! with `cargo build -p bellmono-py --release` and import it as
//! `bellmono_py` (see `python/smoke_test.py`).

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bellmono::canonical::{balance_pair, canonicalize_pair};
use bellmono::chsh::{
    chsh_operator, correlation_matrix, horodecki_max, pair_chsh_max, real_max, ChshPair,
    CorrelationBasis,
};
use bellmono::linalg::{
    expectation, hermitian_eig, kron, partial_trace, ComplexMatrix, PureState,
};
use bellmono::monogamy::{
    commutation_defect, joint_max, monogamy_residual, pair_expectations, tight_family,
    TightFamilyParameter,
};
use bellmono::observables::{pauli, planar_observable, DichotomicObservable, Pauli};
use bellmono::seesaw::{seesaw_maximize, BellScenario, SeesawConfig};

fn value_error(err: bellmono::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// Dense square complex matrix.
#[pyclass(name = "Matrix")]
#[derive(Clone)]
struct PyMatrix {
    inner: ComplexMatrix,
}

#[pymethods]
impl PyMatrix {
    /// Build from nested rows of complex numbers.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(PyValueError::new_err("matrix rows must form a square"));
        }
        let entries = rows.into_iter().flatten().collect();
        Ok(Self {
            inner: ComplexMatrix::from_entries(dim, entries).map_err(value_error)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Entries as nested rows.
    fn entries(&self) -> Vec<Vec<Complex64>> {
        let n = self.inner.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.inner[(i, j)]).collect())
            .collect()
    }

    fn is_hermitian(&self) -> bool {
        self.inner.is_hermitian(1e-12)
    }

    fn dagger(&self) -> Self {
        Self {
            inner: self.inner.dagger(),
        }
    }

    /// Ascending eigenvalues (Hermitian input).
    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        Ok(hermitian_eig(&self.inner)
            .map_err(value_error)?
            .eigenvalues)
    }

    fn __matmul__(&self, other: &PyMatrix) -> PyResult<Self> {
        if self.inner.dim() != other.inner.dim() {
            return Err(PyValueError::new_err("dimension mismatch"));
        }
        Ok(Self {
            inner: &self.inner * &other.inner,
        })
    }

    fn __repr__(&self) -> String {
        format!("Matrix(dim={})", self.inner.dim())
    }
}

/// Normalized pure state over an ordered tensor factorization.
#[pyclass(name = "State")]
#[derive(Clone)]
struct PyState {
    inner: PureState,
}

#[pymethods]
impl PyState {
    #[new]
    fn new(factor_dims: Vec<usize>, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: PureState::new(factor_dims, amplitudes).map_err(value_error)?,
        })
    }

    #[getter]
    fn factor_dims(&self) -> Vec<usize> {
        self.inner.factor_dims().to_vec()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    /// Density matrix |ψ⟩⟨ψ|.
    fn density(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.density(),
        }
    }

    fn __repr__(&self) -> String {
        format!("State(factor_dims={:?})", self.inner.factor_dims())
    }
}

/// The 2×2 Pauli matrix for a name in {"I", "X", "Y", "Z"}.
#[pyfunction(name = "pauli")]
fn pauli_py(name: &str) -> PyResult<PyMatrix> {
    let p: Pauli = name.parse().map_err(value_error)?;
    Ok(PyMatrix { inner: pauli(p) })
}

/// cos(θ)·Z + sin(θ)·X.
#[pyfunction(name = "planar_observable")]
fn planar_observable_py(theta: f64) -> PyMatrix {
    PyMatrix {
        inner: planar_observable(theta).matrix().clone(),
    }
}

/// Kronecker product.
#[pyfunction(name = "kron")]
fn kron_py(a: &PyMatrix, b: &PyMatrix) -> PyMatrix {
    PyMatrix {
        inner: kron(&a.inner, &b.inner),
    }
}

/// Trace out the factors not listed in `keep`.
#[pyfunction(name = "partial_trace")]
fn partial_trace_py(m: &PyMatrix, factor_dims: Vec<usize>, keep: Vec<usize>) -> PyResult<PyMatrix> {
    Ok(PyMatrix {
        inner: partial_trace(&m.inner, &factor_dims, &keep).map_err(value_error)?,
    })
}

/// ⟨ψ|M|ψ⟩.
#[pyfunction(name = "expectation")]
fn expectation_py(state: &PyState, m: &PyMatrix) -> PyResult<f64> {
    expectation(&state.inner, &m.inner).map_err(value_error)
}

fn dichotomic(m: &PyMatrix) -> PyResult<DichotomicObservable> {
    DichotomicObservable::new(m.inner.clone()).map_err(value_error)
}

/// A₁⊗(B₁+B₂) + A₂⊗(B₁-B₂).
#[pyfunction(name = "chsh_operator")]
fn chsh_operator_py(
    a1: &PyMatrix,
    a2: &PyMatrix,
    b1: &PyMatrix,
    b2: &PyMatrix,
) -> PyResult<PyMatrix> {
    let op = chsh_operator(
        &dichotomic(a1)?,
        &dichotomic(a2)?,
        &dichotomic(b1)?,
        &dichotomic(b2)?,
    )
    .map_err(value_error)?;
    Ok(PyMatrix { inner: op })
}

/// The singlet (|01⟩ - |10⟩)/√2.
#[pyfunction(name = "singlet")]
fn singlet_py() -> PyState {
    PyState {
        inner: bellmono::chsh::singlet(),
    }
}

/// Boundary family state at parameter t ∈ [0, π/4].
#[pyfunction(name = "tight_family")]
fn tight_family_py(t: f64) -> PyResult<PyState> {
    let parameter = TightFamilyParameter::new(t).map_err(value_error)?;
    Ok(PyState {
        inner: tight_family(parameter),
    })
}

/// (⟨Y_AY_B⟩, ⟨Y_AY_C⟩, ⟨Y_BY_C⟩) of a three-qubit state.
#[pyfunction(name = "pair_expectations")]
fn pair_expectations_py(state: &PyState) -> PyResult<(f64, f64, f64)> {
    let e = pair_expectations(&state.inner).map_err(value_error)?;
    Ok((e.yy_ab, e.yy_ac, e.yy_bc))
}

fn parse_pair(pair: &str) -> PyResult<ChshPair> {
    match pair {
        "AB" | "ab" => Ok(ChshPair::AB),
        "AC" | "ac" => Ok(ChshPair::AC),
        "BC" | "bc" => Ok(ChshPair::BC),
        other => Err(PyValueError::new_err(format!("unknown pair {other:?}"))),
    }
}

/// Maximal CHSH value of one pair of a real three-qubit state.
#[pyfunction(name = "pair_chsh_max")]
fn pair_chsh_max_py(state: &PyState, pair: &str) -> PyResult<f64> {
    pair_chsh_max(&state.inner, parse_pair(pair)?).map_err(value_error)
}

/// Joint maximization with shared Alice measurements; returns a dict with
/// value_ab, value_ac, sum_of_squares, and the degenerate flag.
#[pyfunction(name = "joint_max")]
fn joint_max_py<'py>(py: Python<'py>, state: &PyState) -> PyResult<Bound<'py, PyDict>> {
    let result = joint_max(&state.inner).map_err(value_error)?;
    let dict = PyDict::new(py);
    dict.set_item("value_ab", result.value_ab)?;
    dict.set_item("value_ac", result.value_ac)?;
    dict.set_item("sum_of_squares", result.sum_of_squares())?;
    dict.set_item("degenerate", result.degenerate)?;
    dict.set_item(
        "alice_dirs",
        (
            result.alice_dirs.0.components().to_vec(),
            result.alice_dirs.1.components().to_vec(),
        ),
    )?;
    Ok(dict)
}

/// Frobenius norm of [T_AB·T_ABᵗ, T_AC·T_ACᵗ].
#[pyfunction(name = "commutation_defect")]
fn commutation_defect_py(state: &PyState) -> PyResult<f64> {
    commutation_defect(&state.inner).map_err(value_error)
}

/// 8 - v_ab² - v_ac².
#[pyfunction(name = "monogamy_residual")]
fn monogamy_residual_py(v_ab: f64, v_ac: f64) -> f64 {
    monogamy_residual(v_ab, v_ac)
}

/// Maximal CHSH value of a two-qubit density matrix: basis "XZ" uses the
/// planar Frobenius form, "XYZ" the full Horodecki form.
#[pyfunction(name = "chsh_max")]
fn chsh_max_py(rho: &PyMatrix, basis: &str) -> PyResult<f64> {
    match basis {
        "XZ" | "xz" => {
            let t = correlation_matrix(&rho.inner, CorrelationBasis::XZ).map_err(value_error)?;
            real_max(&t).map_err(value_error)
        }
        "XYZ" | "xyz" => {
            let t = correlation_matrix(&rho.inner, CorrelationBasis::XYZ).map_err(value_error)?;
            horodecki_max(&t).map_err(value_error)
        }
        other => Err(PyValueError::new_err(format!("unknown basis {other:?}"))),
    }
}

/// Canonical block angles of a pair of projective observables (balanced
/// first when needed).
#[pyfunction(name = "canonicalize_angles")]
fn canonicalize_angles_py(m1: &PyMatrix, m2: &PyMatrix) -> PyResult<Vec<f64>> {
    let (b1, b2) = balance_pair(&dichotomic(m1)?, &dichotomic(m2)?).map_err(value_error)?;
    let form = canonicalize_pair(&b1, &b2).map_err(value_error)?;
    Ok(form.angles().to_vec())
}

/// See-saw maximum of the CHSH scenario on a pair of qubits.
#[pyfunction(name = "seesaw_chsh", signature = (restarts = 20, seed = 42))]
fn seesaw_chsh_py(restarts: usize, seed: u64) -> PyResult<f64> {
    let config = SeesawConfig {
        restarts,
        seed,
        ..Default::default()
    };
    Ok(seesaw_maximize(&BellScenario::chsh(), &config)
        .map_err(value_error)?
        .value)
}

/// See-saw maximum of c_ab·B_AB + c_ac·B_AC on three qubits.
#[pyfunction(name = "seesaw_pair_combination", signature = (c_ab, c_ac, restarts = 8, seed = 42))]
fn seesaw_pair_combination_py(c_ab: f64, c_ac: f64, restarts: usize, seed: u64) -> PyResult<f64> {
    let config = SeesawConfig {
        restarts,
        seed,
        ..Default::default()
    };
    let scenario = BellScenario::chsh_pair_combination(c_ab, c_ac);
    Ok(seesaw_maximize(&scenario, &config)
        .map_err(value_error)?
        .value)
}

/// Joint-max pair values of `n` random real three-qubit states.
#[pyfunction(name = "random_cloud", signature = (n, seed = 42))]
fn random_cloud_py(n: usize, seed: u64) -> PyResult<Vec<(f64, f64)>> {
    let points = bellmono::regions::random_cloud(n, seed).map_err(value_error)?;
    Ok(points.iter().map(|p| (p.b_ab, p.b_ac)).collect())
}

#[pymodule]
fn bellmono_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(pauli_py, m)?)?;
    m.add_function(wrap_pyfunction!(planar_observable_py, m)?)?;
    m.add_function(wrap_pyfunction!(kron_py, m)?)?;
    m.add_function(wrap_pyfunction!(partial_trace_py, m)?)?;
    m.add_function(wrap_pyfunction!(expectation_py, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_operator_py, m)?)?;
    m.add_function(wrap_pyfunction!(singlet_py, m)?)?;
    m.add_function(wrap_pyfunction!(tight_family_py, m)?)?;
    m.add_function(wrap_pyfunction!(pair_expectations_py, m)?)?;
    m.add_function(wrap_pyfunction!(pair_chsh_max_py, m)?)?;
    m.add_function(wrap_pyfunction!(joint_max_py, m)?)?;
    m.add_function(wrap_pyfunction!(commutation_defect_py, m)?)?;
    m.add_function(wrap_pyfunction!(monogamy_residual_py, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_max_py, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize_angles_py, m)?)?;
    m.add_function(wrap_pyfunction!(seesaw_chsh_py, m)?)?;
    m.add_function(wrap_pyfunction!(seesaw_pair_combination_py, m)?)?;
    m.add_function(wrap_pyfunction!(random_cloud_py, m)?)?;
    m.add("TSIRELSON", 2.0 * 2.0_f64.sqrt())?;
    Ok(())
}
