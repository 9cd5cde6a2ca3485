//! Command-line interface: machine-readable JSON/CSV over the library.
//!
//! Exit codes: 0 on success, 1 when a verification subcommand finds an
//! invariant violation, 2 on usage or I/O errors. All randomness is seeded
//! (`--seed`, default 42) and output is deterministic for a fixed argv;
//! numeric output carries 12 significant digits. Nothing is written to
//! disk unless `--out` is given; stderr is reserved for diagnostics.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::canonical::{balance_pair, canonicalize_pair};
use crate::chsh::{pair_chsh_max, ChshPair};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, PureState};
use crate::monogamy::{
    commutation_defect, joint_max, monogamy_residual, pair_expectations, tight_family,
    TightFamilyParameter,
};
use crate::numfmt::{fmt_sig12, round_sig};
use crate::observables::DichotomicObservable;
use crate::regions::{boundary_samples, random_cloud, write_csv, Theory};
use crate::seesaw::{seesaw_fixed_state, seesaw_maximize, BellScenario, SeesawConfig};
use crate::witness::{
    local_commutator_bounds, tsirelson_commutator_relation, witness_bound, WitnessReport,
};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    InvariantViolation,
    UsageOrIo,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::InvariantViolation => 1,
            ExitStatus::UsageOrIo => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "bellmono",
    version,
    about = "CHSH correlations, Tsirelson's bound, and the monogamy disc"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rotate a pair of projective observables into simultaneous 2x2 blocks.
    Canonicalize {
        /// JSON file with {"m1": matrix, "m2": matrix}; stdin when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Batch-verify the monogamy trade-off on random real three-qubit states.
    Verify {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the anticommutation-witness bounds on random configurations.
    Witness {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Alternating maximization of a Bell scenario read from JSON.
    Seesaw {
        #[arg(long)]
        scenario: PathBuf,
        /// Hold the state fixed (JSON pure state) and optimize measurements.
        #[arg(long)]
        fix_state: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        max_iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit region boundary or sample-cloud points as CSV.
    Regions {
        /// classical | quantum | ns | cloud
        #[arg(long)]
        theory: String,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the boundary family state at parameter t.
    TightFamily {
        /// Radians in [0, pi/4].
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Run the CLI against an argv; never panics on bad input.
pub fn run<I, T>(argv: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders --help/--version as "errors" with success status.
            let message = err.render().to_string();
            if err.use_stderr() {
                eprint!("{message}");
                return ExitStatus::UsageOrIo;
            }
            print!("{message}");
            return ExitStatus::Success;
        }
    };
    match dispatch(cli.command) {
        Ok(status) => status,
        Err(err) => {
            eprintln!("error: {err}");
            ExitStatus::UsageOrIo
        }
    }
}

fn dispatch(command: Command) -> io::Result<ExitStatus> {
    match command {
        Command::Canonicalize { input, out } => canonicalize_cmd(input.as_deref(), out.as_deref()),
        Command::Verify { samples, seed, out } => verify_cmd(samples, seed, out.as_deref()),
        Command::Witness { samples, seed, out } => witness_cmd(samples, seed, out.as_deref()),
        Command::Seesaw {
            scenario,
            fix_state,
            restarts,
            seed,
            max_iterations,
            out,
        } => seesaw_cmd(
            &scenario,
            fix_state.as_deref(),
            restarts,
            seed,
            max_iterations,
            out.as_deref(),
        ),
        Command::Regions {
            theory,
            samples,
            seed,
            out,
        } => regions_cmd(&theory, samples, seed, out.as_deref()),
        Command::TightFamily { t, out } => tight_family_cmd(t, out.as_deref()),
    }
}

fn write_output(out: Option<&Path>, content: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}

fn invalid<E: std::fmt::Display>(err: E) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, err.to_string())
}

/// Round every float in a JSON tree to 12 significant digits; integers
/// pass through untouched.
fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                return;
            }
            if let Some(x) = n.as_f64() {
                if let Some(rounded) = serde_json::Number::from_f64(round_sig(x, 12)) {
                    *value = Value::Number(rounded);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> io::Result<String> {
    let mut tree = serde_json::to_value(value).map_err(invalid)?;
    round_json(&mut tree);
    let mut text = serde_json::to_string_pretty(&tree).map_err(invalid)?;
    text.push('\n');
    Ok(text)
}

#[derive(Deserialize)]
struct MatrixPair {
    m1: ComplexMatrix,
    m2: ComplexMatrix,
}

fn canonicalize_cmd(input: Option<&Path>, out: Option<&Path>) -> io::Result<ExitStatus> {
    let text = match input {
        Some(path) => fs::read_to_string(path)?,
        None => {
            let mut buffer = String::new();
            io::stdin().read_to_string(&mut buffer)?;
            buffer
        }
    };
    let pair: MatrixPair = serde_json::from_str(&text).map_err(invalid)?;
    let run = || -> Result<Value> {
        let m1 = DichotomicObservable::new(pair.m1.clone())?;
        let m2 = DichotomicObservable::new(pair.m2.clone())?;
        // Unbalanced projective pairs are extended first; balancing is the
        // identity on already-balanced inputs.
        let (b1, b2) = balance_pair(&m1, &m2)?;
        let form = canonicalize_pair(&b1, &b2)?;
        Ok(json!({
            "basis_change": form.basis_change(),
            "angles": form.angles(),
            "balanced_dimension": b1.dim(),
        }))
    };
    let value = run().map_err(invalid)?;
    write_output(out, &to_pretty_json(&value)?)?;
    Ok(ExitStatus::Success)
}

fn verify_cmd(samples: usize, seed: u64, out: Option<&Path>) -> io::Result<ExitStatus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = String::new();
    let mut violations = 0usize;
    let mut max_equality_residual: f64 = 0.0;
    let mut max_defect: f64 = 0.0;
    report.push_str(
        "index,yy_bc,value_ab,value_ac,sum_of_squares,equality_residual,bound_margin,commutation_defect,degenerate\n",
    );
    for index in 0..samples {
        let psi = PureState::random_real(&[2, 2, 2], &mut rng);
        let result = joint_max(&psi).map_err(invalid)?;
        let yy = pair_expectations(&psi).map_err(invalid)?;
        let sum_sq = result.sum_of_squares();
        let equality_residual = (sum_sq - 8.0 * (1.0 - yy.yy_bc * yy.yy_bc)).abs();
        let bound_margin = monogamy_residual(result.value_ab, result.value_ac);
        let defect = commutation_defect(&psi).map_err(invalid)?;
        let cap_ab = pair_chsh_max(&psi, ChshPair::AB).map_err(invalid)?;
        let cap_ac = pair_chsh_max(&psi, ChshPair::AC).map_err(invalid)?;

        let mut bad = false;
        bad |= bound_margin < -1e-9;
        bad |= defect > 1e-10;
        bad |= !result.degenerate && equality_residual > 1e-6;
        bad |= result.value_ab > cap_ab + 1e-9 || result.value_ac > cap_ac + 1e-9;
        if bad {
            violations += 1;
        }
        if !result.degenerate {
            max_equality_residual = max_equality_residual.max(equality_residual);
        }
        max_defect = max_defect.max(defect);
        let _ = writeln!(
            report,
            "{},{},{},{},{},{},{},{},{}",
            index,
            fmt_sig12(yy.yy_bc),
            fmt_sig12(result.value_ab),
            fmt_sig12(result.value_ac),
            fmt_sig12(sum_sq),
            fmt_sig12(equality_residual),
            fmt_sig12(bound_margin),
            fmt_sig12(defect),
            result.degenerate,
        );
    }
    let _ = writeln!(
        report,
        "summary samples={} violations={} max_equality_residual={} max_commutation_defect={}",
        samples,
        violations,
        fmt_sig12(max_equality_residual),
        fmt_sig12(max_defect),
    );
    write_output(out, &report)?;
    if violations > 0 {
        eprintln!("verify: {violations} of {samples} states violated an invariant");
        return Ok(ExitStatus::InvariantViolation);
    }
    Ok(ExitStatus::Success)
}

const TSIRELSON: f64 = 2.828427124746190;

fn witness_cmd(samples: usize, seed: u64, out: Option<&Path>) -> io::Result<ExitStatus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = String::new();
    report.push_str(
        "sample,dim_a,dim_b,bell_value,witness_expectation,bound,residual,local_residual_b,local_residual_a,tsirelson_residual\n",
    );
    let mut violations = 0usize;
    let scenario = BellScenario::chsh();
    for index in 0..samples {
        let dim_a = 2 + (index % 7);
        let dim_b = 2 + ((index / 7) % 7);
        let psi = PureState::random_complex(&[dim_a, dim_b], &mut rng);
        let rho = psi.density();
        let a_obs = [
            DichotomicObservable::random_projective(dim_a, &mut rng),
            DichotomicObservable::random_projective(dim_a, &mut rng),
        ];
        let b_obs = [
            DichotomicObservable::random_projective(dim_b, &mut rng),
            DichotomicObservable::random_projective(dim_b, &mut rng),
        ];
        let w = crate::observables::commutator_observable(&b_obs[0], &b_obs[1])
            .map_err(invalid)?;
        let WitnessReport {
            bell_value,
            witness_expectation,
            bound,
            residual,
        } = witness_bound(&rho, &scenario, &a_obs, &b_obs, TSIRELSON, &w).map_err(invalid)?;
        let (local_b, local_a) = local_commutator_bounds(&rho, &a_obs, &b_obs).map_err(invalid)?;
        let tsirelson = tsirelson_commutator_relation(&rho, &a_obs, &b_obs).map_err(invalid)?;
        if residual < -1e-8 || local_b < -1e-8 || local_a < -1e-8 || tsirelson < -1e-8 {
            violations += 1;
        }
        let _ = writeln!(
            report,
            "{},{},{},{},{},{},{},{},{},{}",
            index,
            dim_a,
            dim_b,
            fmt_sig12(bell_value),
            fmt_sig12(witness_expectation),
            fmt_sig12(bound),
            fmt_sig12(residual),
            fmt_sig12(local_b),
            fmt_sig12(local_a),
            fmt_sig12(tsirelson),
        );
    }
    write_output(out, &report)?;
    if violations > 0 {
        eprintln!("witness: {violations} of {samples} configurations violated a bound");
        return Ok(ExitStatus::InvariantViolation);
    }
    Ok(ExitStatus::Success)
}

fn seesaw_cmd(
    scenario_path: &Path,
    fix_state: Option<&Path>,
    restarts: usize,
    seed: u64,
    max_iterations: usize,
    out: Option<&Path>,
) -> io::Result<ExitStatus> {
    let scenario: BellScenario =
        serde_json::from_str(&fs::read_to_string(scenario_path)?).map_err(invalid)?;
    let config = SeesawConfig {
        restarts,
        seed,
        max_iterations,
        ..Default::default()
    };
    let result = match fix_state {
        Some(path) => {
            let state: PureState =
                serde_json::from_str(&fs::read_to_string(path)?).map_err(invalid)?;
            seesaw_fixed_state(&scenario, &state, &config).map_err(invalid)?
        }
        None => seesaw_maximize(&scenario, &config).map_err(invalid)?,
    };
    let value = json!({
        "value": result.value,
        "converged": result.converged,
        "iterations": result.value_trace.len(),
        "value_trace": result.value_trace,
        "state": result.state,
        "observables": result.observables,
    });
    write_output(out, &to_pretty_json(&value)?)?;
    Ok(ExitStatus::Success)
}

fn regions_cmd(theory: &str, samples: usize, seed: u64, out: Option<&Path>) -> io::Result<ExitStatus> {
    let points = if theory == "cloud" {
        random_cloud(samples, seed).map_err(invalid)?
    } else {
        let theory: Theory = theory.parse().map_err(invalid)?;
        boundary_samples(theory, samples).map_err(invalid)?
    };
    let mut csv = Vec::new();
    write_csv(&points, &mut csv)?;
    let text = String::from_utf8(csv).expect("CSV output is UTF-8");
    write_output(out, &text)?;
    Ok(ExitStatus::Success)
}

fn tight_family_cmd(t: f64, out: Option<&Path>) -> io::Result<ExitStatus> {
    let run = || -> Result<Value> {
        let parameter = TightFamilyParameter::new(t)?;
        let psi = tight_family(parameter);
        let result = joint_max(&psi)?;
        let yy = pair_expectations(&psi)?;
        let s = 2.0_f64.sqrt() * t.sin();
        Ok(json!({
            "t": t,
            "c_minus": 0.5 * (1.0 - s).max(0.0).sqrt(),
            "c_plus": 0.5 * (1.0 + s).sqrt(),
            "state": psi,
            "pair_expectations": yy,
            "values": [result.value_ab, result.value_ac],
            "monogamy_residual": monogamy_residual(result.value_ab, result.value_ac),
        }))
    };
    let value = run().map_err(invalid)?;
    write_output(out, &to_pretty_json(&value)?)?;
    Ok(ExitStatus::Success)
}
