//! Alternating maximization of correlation Bell operators.
//!
//! An independent numerical oracle for the closed-form results: the state
//! update is a top-eigenvector problem and each measurement update is an
//! eigen-sign problem, so every half-step maximizes a linear functional
//! exactly and the objective ascends monotonically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonical::assemble_blocks;
use crate::error::{Error, Result};
use crate::linalg::{
    expectation, hermitian_eig, kron_all, partial_trace, ComplexMatrix, PureState,
};
use crate::observables::DichotomicObservable;

/// Coefficient tensor of an `m`-party two-measurement correlation Bell
/// operator. Index `i_k ∈ {0, 1, 2}` selects identity or one of the two
/// observables of party `k`; the flattened layout is big-endian by party.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct BellScenario {
    num_parties: usize,
    local_dims: Vec<usize>,
    coefficients: Vec<f64>,
}

/// JSON shape: `{"num_parties": m, "local_dims": [...], "coefficients": [3^m reals]}`.
#[derive(Serialize, Deserialize)]
struct ScenarioRepr {
    num_parties: usize,
    local_dims: Vec<usize>,
    coefficients: Vec<f64>,
}

impl From<BellScenario> for ScenarioRepr {
    fn from(s: BellScenario) -> Self {
        ScenarioRepr {
            num_parties: s.num_parties,
            local_dims: s.local_dims,
            coefficients: s.coefficients,
        }
    }
}

impl TryFrom<ScenarioRepr> for BellScenario {
    type Error = Error;

    fn try_from(r: ScenarioRepr) -> Result<Self> {
        if r.num_parties != r.local_dims.len() {
            return Err(Error::InvalidScenario(format!(
                "num_parties {} does not match {} local dims",
                r.num_parties,
                r.local_dims.len()
            )));
        }
        BellScenario::new(r.local_dims, r.coefficients)
    }
}

impl BellScenario {
    pub fn new(local_dims: Vec<usize>, coefficients: Vec<f64>) -> Result<Self> {
        let m = local_dims.len();
        if m == 0 {
            return Err(Error::InvalidScenario("no parties".into()));
        }
        if local_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidScenario("zero local dimension".into()));
        }
        let expected = 3usize.pow(m as u32);
        if coefficients.len() != expected {
            return Err(Error::InvalidScenario(format!(
                "{} coefficients for {} parties (need 3^{} = {})",
                coefficients.len(),
                m,
                m,
                expected
            )));
        }
        Ok(Self {
            num_parties: m,
            local_dims,
            coefficients,
        })
    }

    /// The CHSH scenario on a pair of qubits:
    /// `c₁₁ = c₁₂ = c₂₁ = 1, c₂₂ = -1`.
    pub fn chsh() -> Self {
        let mut s = Self::new(vec![2, 2], vec![0.0; 9]).expect("valid scenario");
        s.set_coefficient(&[1, 1], 1.0);
        s.set_coefficient(&[1, 2], 1.0);
        s.set_coefficient(&[2, 1], 1.0);
        s.set_coefficient(&[2, 2], -1.0);
        s
    }

    /// Three-party combination `c_ab·B_AB + c_ac·B_AC` with shared Alice
    /// measurements (party 0)..
    pub fn chsh_pair_combination(c_ab: f64, c_ac: f64) -> Self {
        let mut s = Self::new(vec![2, 2, 2], vec![0.0; 27]).expect("valid scenario");
        s.set_coefficient(&[1, 1, 0], c_ab);
        s.set_coefficient(&[1, 2, 0], c_ab);
        s.set_coefficient(&[2, 1, 0], c_ab);
        s.set_coefficient(&[2, 2, 0], -c_ab);
        s.set_coefficient(&[1, 0, 1], c_ac);
        s.set_coefficient(&[1, 0, 2], c_ac);
        s.set_coefficient(&[2, 0, 1], c_ac);
        s.set_coefficient(&[2, 0, 2], -c_ac);
        s
    }

    pub fn num_parties(&self) -> usize {
        self.num_parties
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn joint_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    fn flat_index(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &i| acc * 3 + i)
    }

    pub fn coefficient(&self, index: &[usize]) -> f64 {
        self.coefficients[self.flat_index(index)]
    }

    pub fn set_coefficient(&mut self, index: &[usize], value: f64) {
        let flat = self.flat_index(index);
        self.coefficients[flat] = value;
    }

    /// True iff no coefficient touches the identity slot of any party
    /// (a pure correlation operator).
    pub fn is_correlation_only(&self) -> bool {
        self.multi_indices()
            .all(|idx| !idx.contains(&0) || self.coefficient(&idx) == 0.0)
    }

    fn multi_indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let m = self.num_parties;
        (0..3usize.pow(m as u32)).map(move |mut flat| {
            let mut idx = vec![0usize; m];
            for k in (0..m).rev() {
                idx[k] = flat % 3;
                flat /= 3;
            }
            idx
        })
    }

    fn validate_observables(&self, observables: &[[DichotomicObservable; 2]]) -> Result<()> {
        if observables.len() != self.num_parties {
            return Err(Error::InvalidScenario(format!(
                "{} observable pairs for {} parties",
                observables.len(),
                self.num_parties
            )));
        }
        for (k, pair) in observables.iter().enumerate() {
            for obs in pair {
                if obs.dim() != self.local_dims[k] {
                    return Err(Error::DimensionMismatch(format!(
                        "party {} observable has dimension {} instead of {}",
                        k,
                        obs.dim(),
                        self.local_dims[k]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Stopping rule and restart schedule for the alternating maximization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            convergence_tol: 1e-10,
            restarts: 20,
            seed: 42,
        }
    }
}

impl SeesawConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.restarts == 0 || self.convergence_tol <= 0.0 {
            return Err(Error::InvalidScenario(
                "see-saw needs positive iteration/restart counts and tolerance".into(),
            ));
        }
        Ok(())
    }
}

/// Best configuration found by the see-saw.
#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub value: f64,
    pub state: PureState,
    pub observables: Vec<[DichotomicObservable; 2]>,
    /// Objective after each full sweep of the best restart; monotone
    /// nondecreasing.
    pub value_trace: Vec<f64>,
    pub converged: bool,
}

/// `Σ c_{i₁..i_m} ⊗_k M_{k,i_k}` with `M_{k,0} = identity`.
pub fn build_bell_operator(
    scenario: &BellScenario,
    observables: &[[DichotomicObservable; 2]],
) -> Result<ComplexMatrix> {
    scenario.validate_observables(observables)?;
    let identities: Vec<ComplexMatrix> = scenario
        .local_dims()
        .iter()
        .map(|&d| ComplexMatrix::identity(d))
        .collect();
    let mut op = ComplexMatrix::zeros(scenario.joint_dim());
    for idx in scenario.multi_indices() {
        let c = scenario.coefficient(&idx);
        if c == 0.0 {
            continue;
        }
        let factors: Vec<&ComplexMatrix> = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| match i {
                0 => &identities[k],
                j => observables[k][j - 1].matrix(),
            })
            .collect();
        op = &op + &kron_all(&factors).scale_re(c);
    }
    Ok(op)
}

/// The Hermitian operator `F` on party `k`'s space with
/// `⟨B⟩ = tr(M_{k,meas} F) + const`, holding the state and every other
/// observable fixed.
pub fn effective_operator(
    scenario: &BellScenario,
    state: &PureState,
    observables: &[[DichotomicObservable; 2]],
    party: usize,
    meas: usize,
) -> Result<ComplexMatrix> {
    scenario.validate_observables(observables)?;
    if party >= scenario.num_parties() || meas == 0 || meas > 2 {
        return Err(Error::OutOfRange(format!(
            "party {} measurement {}",
            party, meas
        )));
    }
    if state.factor_dims() != scenario.local_dims() {
        return Err(Error::DimensionMismatch(
            "state factorization does not match the scenario".into(),
        ));
    }
    let identities: Vec<ComplexMatrix> = scenario
        .local_dims()
        .iter()
        .map(|&d| ComplexMatrix::identity(d))
        .collect();
    let rho = state.density();
    let mut f = ComplexMatrix::zeros(scenario.local_dims()[party]);
    for idx in scenario.multi_indices() {
        if idx[party] != meas {
            continue;
        }
        let c = scenario.coefficient(&idx);
        if c == 0.0 {
            continue;
        }
        // Identity at the target slot, current observables elsewhere.
        let factors: Vec<&ComplexMatrix> = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| match (k == party, i) {
                (true, _) | (false, 0) => &identities[k],
                (false, j) => observables[k][j - 1].matrix(),
            })
            .collect();
        let rest = kron_all(&factors);
        let reduced = partial_trace(&(&rest * &rho), scenario.local_dims(), &[party])?;
        f = &f + &reduced.scale_re(c);
    }
    Ok(f.hermitized())
}

/// The eigen-sign of a Hermitian operator: `Σ sign(λ_i)|v_i⟩⟨v_i|` with
/// `sign(0) = +1`. Projective, and maximizes `tr(M F)` over observables
/// with spectrum in `[-1, 1]`, achieving `Σ|λ_i|`.
pub fn sign_observable(f: &ComplexMatrix) -> Result<DichotomicObservable> {
    let eig = hermitian_eig(f)?;
    let n = f.dim();
    let mut m = ComplexMatrix::zeros(n);
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let sign = if lambda < 0.0 { -1.0 } else { 1.0 };
        let v = eig.eigenvector(j);
        for row in 0..n {
            for col in 0..n {
                m[(row, col)] += v[row] * v[col].conj() * sign;
            }
        }
    }
    DichotomicObservable::new(m.hermitized())
}

/// Random real projective pair in generic position: a block pair with
/// random angles, conjugated by a random orthogonal matrix (plus a random
/// ±1 slot when the dimension is odd).
fn random_real_pair<R: Rng>(dim: usize, rng: &mut R) -> [DichotomicObservable; 2] {
    let half = dim / 2;
    let angles: Vec<f64> = (0..half)
        .map(|_| rng.gen::<f64>() * std::f64::consts::PI)
        .collect();
    let (mut b1, mut b2) = if half > 0 {
        assemble_blocks(&angles)
    } else {
        (ComplexMatrix::zeros(0), ComplexMatrix::zeros(0))
    };
    if dim % 2 == 1 {
        let s1 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let s2 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        b1 = b1.direct_sum(&ComplexMatrix::diagonal(&[s1]));
        b2 = b2.direct_sum(&ComplexMatrix::diagonal(&[s2]));
    }
    let o = ComplexMatrix::random_orthogonal(dim, rng);
    let od = o.dagger();
    let m1 = (&(&o * &b1) * &od).hermitized();
    let m2 = (&(&o * &b2) * &od).hermitized();
    [
        DichotomicObservable::new(m1).expect("conjugated blocks are projective"),
        DichotomicObservable::new(m2).expect("conjugated blocks are projective"),
    ]
}

fn top_eigenstate(op: &ComplexMatrix, dims: &[usize]) -> Result<PureState> {
    let eig = hermitian_eig(op)?;
    let top = eig.eigenvector(op.dim() - 1);
    PureState::from_unnormalized(dims.to_vec(), top)
}

struct SweepOutcome {
    value: f64,
    state: PureState,
    observables: Vec<[DichotomicObservable; 2]>,
    trace: Vec<f64>,
    converged: bool,
}

fn run_restart(
    scenario: &BellScenario,
    config: &SeesawConfig,
    fixed_state: Option<&PureState>,
    rng: &mut ChaCha8Rng,
) -> Result<SweepOutcome> {
    let mut observables: Vec<[DichotomicObservable; 2]> = scenario
        .local_dims()
        .iter()
        .map(|&d| random_real_pair(d, rng))
        .collect();
    let mut state = match fixed_state {
        Some(s) => s.clone(),
        None => top_eigenstate(
            &build_bell_operator(scenario, &observables)?,
            scenario.local_dims(),
        )?,
    };
    let mut trace = Vec::new();
    let mut previous = f64::NEG_INFINITY;
    let mut converged = false;

    for _ in 0..config.max_iterations {
        if fixed_state.is_none() {
            let op = build_bell_operator(scenario, &observables)?;
            state = top_eigenstate(&op, scenario.local_dims())?;
        }
        for party in 0..scenario.num_parties() {
            for meas in 1..=2usize {
                let f = effective_operator(scenario, &state, &observables, party, meas)?;
                observables[party][meas - 1] = sign_observable(&f)?;
            }
        }
        let op = build_bell_operator(scenario, &observables)?;
        let value = expectation(&state, &op)?;
        trace.push(value);
        if value - previous < config.convergence_tol && previous.is_finite() {
            converged = true;
            break;
        }
        previous = value;
    }

    let value = *trace.last().expect("at least one sweep");
    Ok(SweepOutcome {
        value,
        state,
        observables,
        trace,
        converged,
    })
}

fn seesaw_run(
    scenario: &BellScenario,
    config: &SeesawConfig,
    fixed_state: Option<&PureState>,
) -> Result<SeesawResult> {
    config.validate()?;
    if let Some(state) = fixed_state {
        if state.factor_dims() != scenario.local_dims() {
            return Err(Error::DimensionMismatch(
                "fixed state factorization does not match the scenario".into(),
            ));
        }
    }
    let mut best: Option<SweepOutcome> = None;
    for restart in 0..config.restarts {
        let mut rng =
            ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64
                .wrapping_mul(restart as u64 + 1)));
        let outcome = run_restart(scenario, config, fixed_state, &mut rng)?;
        if best.as_ref().map_or(true, |b| outcome.value > b.value) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart");
    Ok(SeesawResult {
        value: best.value,
        state: best.state,
        observables: best.observables,
        value_trace: best.trace,
        converged: best.converged,
    })
}

/// Maximize over states and projective observables, best of the configured
/// restarts. A restart that exhausts its iteration budget is returned with
/// `converged = false` rather than an error.
pub fn seesaw_maximize(scenario: &BellScenario, config: &SeesawConfig) -> Result<SeesawResult> {
    seesaw_run(scenario, config, None)
}

/// Measurement-only see-saw with the state held fixed.
pub fn seesaw_fixed_state(
    scenario: &BellScenario,
    state: &PureState,
    config: &SeesawConfig,
) -> Result<SeesawResult> {
    seesaw_run(scenario, config, Some(state))
}
