//! Randomized property suites.
//!
//! Every suite draws its inputs from one seeded stream, evaluates them in
//! parallel and reports the worst violation against a fixed tolerance.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloners::{random_bloch_on_level, theorem2_falsify, unrestricted_broadcast, BroadcasterSpec};
use crate::magic::{magic_power, rom_lp_oracle, rom_qubit, sre2_extended, sre2_pure};
use crate::qstate::{
    apply_unitary, haar_random_pure_with, random_mixed_with, reduce_pure, tensor_pure, BlochVector, DensityMatrix,
    PureState, Subsystem,
};
use crate::stabkit::{broadcast_geometry_certificate, clifford_generators, clifford_group_1q, stabilizer_states};
use crate::{Error, Result, CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma1,
    Clifford,
    Additivity,
    Convexity,
    Theorem2,
    Theorem3,
    Geometry,
    Monotone,
    Faithfulness,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Lemma1,
        Suite::Clifford,
        Suite::Additivity,
        Suite::Convexity,
        Suite::Theorem2,
        Suite::Theorem3,
        Suite::Geometry,
        Suite::Monotone,
        Suite::Faithfulness,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Clifford => "clifford",
            Suite::Additivity => "additivity",
            Suite::Convexity => "convexity",
            Suite::Theorem2 => "theorem2",
            Suite::Theorem3 => "theorem3",
            Suite::Geometry => "geometry",
            Suite::Monotone => "monotone",
            Suite::Faithfulness => "faithfulness",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Suite::Lemma1 => 1e-8,
            Suite::Clifford | Suite::Additivity | Suite::Faithfulness => 1e-10,
            Suite::Convexity => 1e-12,
            Suite::Theorem3 | Suite::Monotone => 1e-9,
            Suite::Theorem2 | Suite::Geometry => 0.0,
        }
    }

    pub fn default_samples(&self) -> usize {
        match self {
            Suite::Lemma1 => 100_000,
            Suite::Clifford | Suite::Additivity | Suite::Geometry => 1_000,
            Suite::Theorem2 => 720,
            Suite::Faithfulness => 100,
            Suite::Convexity | Suite::Theorem3 | Suite::Monotone => 10_000,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub samples: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub runtime_ms: u64,
    /// Suite-specific figures, e.g. the theorem-2 gap.
    pub detail: String,
}

pub fn run_suite(suite: Suite, samples: usize, seed: u64) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (max_violation, detail) = match suite {
        Suite::Lemma1 => lemma1(samples, &mut rng)?,
        Suite::Clifford => clifford(samples, &mut rng)?,
        Suite::Additivity => additivity(samples, &mut rng)?,
        Suite::Convexity => convexity(samples, &mut rng)?,
        Suite::Theorem2 => theorem2(samples)?,
        Suite::Theorem3 => theorem3(samples, &mut rng)?,
        Suite::Geometry => geometry(samples, &mut rng)?,
        Suite::Monotone => monotone(samples, &mut rng)?,
        Suite::Faithfulness => faithfulness(samples, &mut rng)?,
    };
    let tolerance = suite.tolerance();
    Ok(VerificationReport {
        check_name: suite.name().to_string(),
        samples,
        max_violation,
        tolerance,
        pass: max_violation <= tolerance,
        seed,
        runtime_ms: start.elapsed().as_millis() as u64,
        detail,
    })
}

type Outcome = Result<(f64, String)>;

fn worst(values: impl ParallelIterator<Item = Result<f64>>) -> Result<f64> {
    values.try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Closed-form robustness against the exact linear program, half pure and half mixed inputs.
fn lemma1(n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let states: Vec<DensityMatrix> = (0..n)
        .map(|i| {
            if i % 2 == 0 {
                haar_random_pure_with(2, rng).map(|p| p.density())
            } else {
                random_mixed_with(2, rng)
            }
        })
        .collect::<Result<_>>()?;
    let v = worst(states.par_iter().map(|rho| Ok((rom_qubit(rho)? - rom_lp_oracle(rho)?).abs())))?;
    Ok((v, String::new()))
}

fn random_clifford_2q(rng: &mut ChaCha8Rng, length: usize) -> CMatrix {
    let gens = clifford_generators(2);
    let mut u = CMatrix::identity(4, 4);
    for _ in 0..length {
        u = &gens[rng.random_range(0..gens.len())] * u;
    }
    u
}

/// `M2` unchanged by Clifford unitaries on one and two qubits.
fn clifford(n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let group = clifford_group_1q();
    let pairs: Vec<(PureState, CMatrix, usize)> = (0..n)
        .map(|i| {
            if i % 2 == 0 {
                let c = group[rng.random_range(0..group.len())].clone();
                Ok((haar_random_pure_with(2, rng)?, c, 1))
            } else {
                let c = random_clifford_2q(rng, 40);
                Ok((haar_random_pure_with(4, rng)?, c, 2))
            }
        })
        .collect::<Result<_>>()?;
    let v = worst(pairs.par_iter().map(|(psi, c, q)| {
        Ok((sre2_pure(&apply_unitary(c, psi)?, *q)? - sre2_pure(psi, *q)?).abs())
    }))?;
    Ok((v, String::new()))
}

/// `M2(a (x) b) = M2(a) + M2(b)` for single-qubit factors.
fn additivity(n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let pairs: Vec<(PureState, PureState)> = (0..n)
        .map(|_| Ok((haar_random_pure_with(2, rng)?, haar_random_pure_with(2, rng)?)))
        .collect::<Result<_>>()?;
    let v = worst(pairs.par_iter().map(|(a, b)| {
        Ok((sre2_pure(&tensor_pure(a, b), 2)? - sre2_pure(a, 1)? - sre2_pure(b, 1)?).abs())
    }))?;
    Ok((v, String::new()))
}

/// `R(p rho + (1 - p) sigma) <= p R(rho) + (1 - p) R(sigma)`.
fn convexity(n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let cases: Vec<(DensityMatrix, DensityMatrix, f64)> = (0..n)
        .map(|i| {
            let draw = |rng: &mut ChaCha8Rng| -> Result<DensityMatrix> {
                if i % 2 == 0 {
                    Ok(haar_random_pure_with(2, rng)?.density())
                } else {
                    random_mixed_with(2, rng)
                }
            };
            Ok((draw(rng)?, draw(rng)?, rng.random::<f64>()))
        })
        .collect::<Result<_>>()?;
    let v = worst(cases.par_iter().map(|(a, b, p)| {
        let mix = rom_qubit(&a.mix(*p, b, 1.0 - p)?)?;
        Ok((mix - p * rom_qubit(a)? - (1.0 - p) * rom_qubit(b)?).max(0.0))
    }))?;
    Ok((v, String::new()))
}

/// T/T_perp broadcaster at `theta = pi/4` over `n` equally spaced `zeta`.
/// Violation is the shortfall of the gap below 0.1 or any breach of the
/// closed-form (1e-9) and output-invariance (1e-12) checks.
fn theorem2(n: usize) -> Outcome {
    let grid: Vec<f64> = (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect();
    let report = theorem2_falsify(&BroadcasterSpec::t_type(), std::f64::consts::FRAC_PI_4, &grid)?;
    let v = (0.1 - report.max_gap)
        .max(report.max_closed_form_error - 1e-9)
        .max(report.output_spread - 1e-12)
        .max(0.0);
    let detail = format!(
        "max_gap={:.6} worst_zeta={:.6} closed_form_error={:.3e} output_spread={:.3e}",
        report.max_gap, report.worst_zeta, report.max_closed_form_error, report.output_spread
    );
    Ok((v, detail))
}

/// Reduced outputs of random broadcasters never exceed the reference robustness.
fn theorem3(n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let cases: Vec<(BroadcasterSpec, C64, C64)> = (0..n)
        .map(|_| {
            let spec = BroadcasterSpec::random_with(rng);
            let coeffs = haar_random_pure_with(2, rng)?;
            Ok((spec, coeffs.amps()[0], coeffs.amps()[1]))
        })
        .collect::<Result<_>>()?;
    let v = worst(cases.par_iter().map(|(spec, a, b)| {
        let (sys, aux) = unrestricted_broadcast(spec, *a, *b)?;
        let excess = rom_qubit(&aux)?.max(rom_qubit(&sys)?) - spec.reference_magic();
        Ok(excess.max(0.0))
    }))?;
    Ok((v, String::new()))
}

/// `M2_ext` of a two-qubit pure state bounds that of either marginal.
fn monotone(n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let states: Vec<PureState> = (0..n).map(|_| haar_random_pure_with(4, rng)).collect::<Result<_>>()?;
    let v = worst(states.par_iter().map(|psi| {
        let whole = sre2_extended(&psi.density(), 2)?;
        let mut excess: f64 = 0.0;
        for keep in [Subsystem::First, Subsystem::Second] {
            let part = sre2_extended(&reduce_pure(psi, [2, 2], keep)?, 1)?;
            excess = excess.max(part - whole);
        }
        Ok(excess)
    }))?;
    Ok((v, String::new()))
}

/// `M2 = 0` on all stabilizer states and zero magic power for `n` Clifford words.
fn faithfulness(n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let mut stab_worst: f64 = 0.0;
    for q in [1, 2] {
        for s in stabilizer_states(q)?.states() {
            stab_worst = stab_worst.max(sre2_pure(s, q)?.abs());
        }
    }
    let words: Vec<CMatrix> = (0..n).map(|_| random_clifford_2q(rng, 30)).collect();
    let power_worst = worst(words.par_iter().map(|u| magic_power(u).map(f64::abs)))?;
    let detail = format!("stabilizer_sre2={stab_worst:.3e} clifford_power={power_worst:.3e}");
    Ok((stab_worst.max(power_worst), detail))
}

/// Randomized line pairs for the geometry suite, all endpoints on one level.
#[derive(Debug, Clone)]
pub struct GeometryInstance {
    pub sys: [BlochVector; 2],
    pub aux: [BlochVector; 2],
    pub level: f64,
}

/// Half the instances reuse the system line up to a signed permutation, which
/// keeps the crossing weights identical; the rest are independent.
pub fn random_geometry_instance<R: Rng + ?Sized>(rng: &mut R) -> GeometryInstance {
    let psi = haar_random_pure_with(2, rng).expect("qubit");
    let b0 = crate::qstate::bloch_from_density(&psi.density()).expect("qubit");
    let reference = b0.l1_norm();
    let sys1 = if rng.random_bool(0.5) { -b0 } else { random_bloch_on_level(rng, reference, &b0) };
    let sys = [b0, sys1];
    let aux = if rng.random_bool(0.5) {
        let perm = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]][rng.random_range(0..6)];
        let signs: [f64; 3] = std::array::from_fn(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 });
        let map = |b: &BlochVector| {
            let m = b.components();
            BlochVector::from_array(std::array::from_fn(|j| signs[j] * m[perm[j]])).expect("same norm")
        };
        [map(&sys[0]), map(&sys[1])]
    } else {
        let a0 = random_bloch_on_level(rng, reference, &b0);
        [a0, random_bloch_on_level(rng, reference, &b0)]
    };
    let level = 1.0 + rng.random::<f64>() * (reference - 1.0);
    GeometryInstance { sys, aux, level }
}

/// Crossing cells of `t -> |lerp(t)|_1 - level` on a uniform grid of `points`.
pub fn scan_crossings(b0: &BlochVector, b1: &BlochVector, level: f64, points: usize) -> Vec<usize> {
    let g = |k: usize| b0.lerp(b1, k as f64 / (points - 1) as f64).l1_norm() - level;
    let mut cells = Vec::new();
    let mut prev = g(0);
    for k in 1..points {
        let cur = g(k);
        if prev == 0.0 || prev.signum() != cur.signum() {
            cells.push(k - 1);
        }
        prev = cur;
    }
    if prev == 0.0 {
        cells.push(points - 2);
    }
    cells
}

/// Compares the exact certificate with a dense scan. An instance disagrees
/// when the scan finds a shared crossing cell that the certificate misses (or
/// vice versa), unless the certificate's nearest system/auxiliary crossings
/// are within two grid cells of each other.
pub fn geometry_disagrees(inst: &GeometryInstance, points: usize) -> Result<bool> {
    let cert = broadcast_geometry_certificate(&inst.sys[0], &inst.sys[1], &inst.aux[0], &inst.aux[1], inst.level)?;
    let sys_cells = scan_crossings(&inst.sys[0], &inst.sys[1], inst.level, points);
    let aux_cells = scan_crossings(&inst.aux[0], &inst.aux[1], inst.level, points);
    let scan_common = sys_cells
        .iter()
        .any(|s| aux_cells.iter().any(|a| s.abs_diff(*a) <= 1));
    if scan_common == cert.broadcastable {
        return Ok(false);
    }
    let resolution = 2.0 / (points - 1) as f64;
    let nearest = cert
        .system_t
        .iter()
        .flat_map(|s| cert.auxiliary_t.iter().map(move |a| (s - a).abs()))
        .fold(f64::INFINITY, f64::min);
    Ok(nearest > resolution)
}

/// Certificate against a 10^4-point scan on `n` random instances; the
/// violation is the number of disagreements.
fn geometry(n: usize, rng: &mut ChaCha8Rng) -> Outcome {
    let instances: Vec<GeometryInstance> = (0..n).map(|_| random_geometry_instance(rng)).collect();
    let flags = instances
        .par_iter()
        .map(|inst| geometry_disagrees(inst, 10_000))
        .collect::<Result<Vec<bool>>>()?;
    let broadcastable = instances
        .iter()
        .map(|i| broadcast_geometry_certificate(&i.sys[0], &i.sys[1], &i.aux[0], &i.aux[1], i.level))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .filter(|c| c.broadcastable)
        .count();
    let bad = flags.iter().filter(|f| **f).count();
    Ok((bad as f64, format!("disagreements={bad} broadcastable={broadcastable}")))
}
