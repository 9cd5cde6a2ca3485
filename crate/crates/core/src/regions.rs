//! The accessible region of pair CHSH values as data: classical square,
//! quantum circle, no-signalling diamond, plus realized sample clouds.
//!
//! Quantum first-quadrant boundary points are certificates: each carries
//! the boundary-family parameter of a state that realizes it, re-checkable
//! through `joint_max`. The no-signalling boundary is analytic only.

use std::fmt;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::PureState;
use crate::monogamy::{joint_max, tight_family, TightFamilyParameter};
use crate::numfmt::fmt_sig12;

const TSIRELSON: f64 = 2.828427124746190; // 2√2

/// Region a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theory {
    Classical,
    Quantum,
    NoSignalling,
}

impl std::str::FromStr for Theory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Theory::Classical),
            "quantum" => Ok(Theory::Quantum),
            "ns" | "no-signalling" => Ok(Theory::NoSignalling),
            other => Err(Error::OutOfRange(format!("unknown theory {other:?}"))),
        }
    }
}

/// CSV label of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLabel {
    Classical,
    Quantum,
    Ns,
    Sample,
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointLabel::Classical => "classical",
            PointLabel::Quantum => "quantum",
            PointLabel::Ns => "ns",
            PointLabel::Sample => "sample",
        })
    }
}

/// Whether the coordinates come from a state evaluation or from the
/// analytic boundary formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Realized,
    Analytic,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Realized => "realized",
            Provenance::Analytic => "analytic",
        })
    }
}

/// One `(⟨B_AB⟩, ⟨B_AC⟩)` point.
#[derive(Debug, Clone)]
pub struct RegionPoint {
    pub b_ab: f64,
    pub b_ac: f64,
    pub label: PointLabel,
    pub provenance: Provenance,
    /// Boundary angle, family parameter, or sample index.
    pub param: f64,
}

/// The four extreme points of the deterministic-strategy region,
/// `(±2, ±2)`, each realized by an explicit strategy.
pub fn classical_vertices() -> Vec<RegionPoint> {
    let strategies = deterministic_strategy_values();
    let mut vertices: Vec<RegionPoint> = Vec::new();
    for (index, &(x, y)) in strategies.iter().enumerate() {
        if x.abs() == 2.0 && y.abs() == 2.0
            && !vertices
                .iter()
                .any(|v| v.b_ab == x && v.b_ac == y)
        {
            vertices.push(RegionPoint {
                b_ab: x,
                b_ac: y,
                label: PointLabel::Classical,
                provenance: Provenance::Realized,
                param: index as f64,
            });
        }
    }
    vertices.sort_by(|p, q| {
        (p.b_ab, p.b_ac)
            .partial_cmp(&(q.b_ab, q.b_ac))
            .expect("finite coordinates")
    });
    vertices
}

/// `(⟨B_AB⟩, ⟨B_AC⟩)` of every deterministic strategy: each party outputs
/// a fixed ±1 per measurement, 4 choices per party, 64 in total.
pub fn deterministic_strategy_values() -> Vec<(f64, f64)> {
    let sign = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };
    let mut values = Vec::with_capacity(64);
    for code in 0..64usize {
        let a1 = sign((code >> 5) & 1);
        let a2 = sign((code >> 4) & 1);
        let b1 = sign((code >> 3) & 1);
        let b2 = sign((code >> 2) & 1);
        let c1 = sign((code >> 1) & 1);
        let c2 = sign(code & 1);
        let b_ab = a1 * (b1 + b2) + a2 * (b1 - b2);
        let b_ac = a1 * (c1 + c2) + a2 * (c1 - c2);
        values.push((b_ab, b_ac));
    }
    values
}

/// `n` points on the boundary of a theory's region, parametrized by the
/// polar angle. Quantum points in the closed first quadrant are realized by
/// boundary-family states through `joint_max`; everything else is analytic.
pub fn boundary_samples(theory: Theory, n: usize) -> Result<Vec<RegionPoint>> {
    if n == 0 {
        return Err(Error::OutOfRange(
            "boundary sampling needs at least one point".into(),
        ));
    }
    let mut points = Vec::with_capacity(n);
    for j in 0..n {
        let phi = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let point = match theory {
            Theory::Classical => analytic_point(
                PointLabel::Classical,
                phi,
                2.0 / phi.cos().abs().max(phi.sin().abs()),
            ),
            Theory::NoSignalling => analytic_point(
                PointLabel::Ns,
                phi,
                4.0 / (phi.cos().abs() + phi.sin().abs()),
            ),
            Theory::Quantum => quantum_point(phi)?,
        };
        points.push(point);
    }
    points.sort_by(|p, q| p.param.partial_cmp(&q.param).expect("finite parameters"));
    Ok(points)
}

fn analytic_point(label: PointLabel, phi: f64, radius: f64) -> RegionPoint {
    RegionPoint {
        b_ab: radius * phi.cos(),
        b_ac: radius * phi.sin(),
        label,
        provenance: Provenance::Analytic,
        param: phi,
    }
}

/// First-quadrant quantum boundary points are produced by an actual state:
/// the boundary family directly for `φ ≤ π/4`, and with the B/C factors
/// swapped for `φ ∈ (π/4, π/2]`.
fn quantum_point(phi: f64) -> Result<RegionPoint> {
    let quarter = std::f64::consts::FRAC_PI_2;
    if !(0.0..=quarter).contains(&phi) {
        return Ok(analytic_point(PointLabel::Quantum, phi, TSIRELSON));
    }
    let (state, _t) = boundary_state(phi)?;
    let result = joint_max(&state)?;
    Ok(RegionPoint {
        b_ab: result.value_ab,
        b_ac: result.value_ac,
        label: PointLabel::Quantum,
        provenance: Provenance::Realized,
        param: phi,
    })
}

/// A state whose joint maxima sit at angle `phi` on the boundary circle.
pub fn boundary_state(phi: f64) -> Result<(PureState, f64)> {
    let eighth = std::f64::consts::FRAC_PI_4;
    if phi <= eighth {
        Ok((tight_family(TightFamilyParameter::new(phi)?), phi))
    } else {
        let t = (2.0 * eighth - phi).max(0.0);
        let swapped = tight_family(TightFamilyParameter::new(t)?).permute_factors(&[0, 2, 1])?;
        Ok((swapped, t))
    }
}

/// `n` random real three-qubit states mapped through `joint_max`. Every
/// point must land inside the quantum circle; a violation is a library
/// bug, reported as an error.
pub fn random_cloud(n: usize, seed: u64) -> Result<Vec<RegionPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    for index in 0..n {
        let psi = PureState::random_real(&[2, 2, 2], &mut rng);
        let result = joint_max(&psi)?;
        let (x, y) = (result.value_ab, result.value_ac);
        if x * x + y * y > 8.0 + 1e-8 {
            return Err(Error::InvariantViolation(format!(
                "sample {} lies outside the quantum circle: ({}, {})",
                index, x, y
            )));
        }
        points.push(RegionPoint {
            b_ab: x,
            b_ac: y,
            label: PointLabel::Sample,
            provenance: Provenance::Realized,
            param: index as f64,
        });
    }
    Ok(points)
}

/// Write points as CSV with the fixed header and 12-significant-digit
/// floats; deterministic for a fixed input.
pub fn write_csv<W: Write>(points: &[RegionPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "b_ab,b_ac,label,provenance,param")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_sig12(p.b_ab),
            fmt_sig12(p.b_ac),
            p.label,
            p.provenance,
            fmt_sig12(p.param)
        )?;
    }
    Ok(())
}
