//! Two-qubit broadcasting unitaries found by evolution-strategy search.
//!
//! A qubit `|psi>_S` and a blank `|0>_A` are evolved by a 15-angle unitary.
//! The magic objective asks both reduced outputs to carry the input's
//! robustness; the state objective asks both to match `|psi>` itself.

mod isres;
mod unitary;

pub use unitary::{build_unitary, core_unitary, su2_zyz, UnitaryParams15};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::magic::magic_power;
use crate::qstate::{bloch_from_density, haar_random_pure_with, PureState};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Magic,
    State,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "magic" => Ok(Self::Magic),
            "state" => Ok(Self::State),
            other => Err(Error::InvalidInput(format!("unknown objective '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Offspring per generation; even and at least 4.
    pub population: usize,
    /// Objective evaluations per sample, shared by all restarts.
    pub max_evals: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            population: 70,
            max_evals: 200_000,
            epsilon: 1e-4,
            seed: 0,
            restarts: 5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 || !self.population.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "population must be even and >= 4, got {}",
                self.population
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_evals == 0 {
            return Err(Error::InvalidInput("max_evals must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadcastOutcome {
    pub params: UnitaryParams15,
    pub objective_value: f64,
    /// Root fidelity `sqrt(<psi|rho_S|psi>)`.
    pub sys_fidelity: f64,
    pub aux_fidelity: f64,
    /// Overlap `<psi|rho_S|psi>`.
    pub sys_overlap: f64,
    pub aux_overlap: f64,
    pub sys_magic: f64,
    pub aux_magic: f64,
    pub input_magic: f64,
    pub magic_power: f64,
    pub evals_used: usize,
    pub converged: bool,
}

/// Reduced Bloch vectors of `U (|psi> (x) |0>)`.
struct Evolved {
    sys: [f64; 3],
    aux: [f64; 3],
}

fn evolve(p: &UnitaryParams15, a: C64, b: C64) -> Evolved {
    let u = unitary::unitary_array(p);
    // |psi>|0> = a|00> + b|10>.
    let v: [C64; 4] = std::array::from_fn(|i| u[i][0] * a + u[i][2] * b);
    // v[2s + t] for system s, auxiliary t.
    let bloch = |r00: f64, r11: f64, r01: C64| [2.0 * r01.re, -2.0 * r01.im, r00 - r11];
    let sys = bloch(
        v[0].norm_sqr() + v[1].norm_sqr(),
        v[2].norm_sqr() + v[3].norm_sqr(),
        v[0] * v[2].conj() + v[1] * v[3].conj(),
    );
    let aux = bloch(
        v[0].norm_sqr() + v[2].norm_sqr(),
        v[1].norm_sqr() + v[3].norm_sqr(),
        v[0] * v[1].conj() + v[2] * v[3].conj(),
    );
    Evolved { sys, aux }
}

fn rom(m: &[f64; 3]) -> f64 {
    m.iter().map(|x| x.abs()).sum::<f64>().max(1.0)
}

fn overlap(input: &[f64; 3], out: &[f64; 3]) -> f64 {
    (0.5 * (1.0 + input.iter().zip(out).map(|(x, y)| x * y).sum::<f64>())).clamp(0.0, 1.0)
}

struct Prepared {
    a: C64,
    b: C64,
    bloch: [f64; 3],
    magic: f64,
}

fn prepare(psi: &PureState) -> Result<Prepared> {
    if psi.dim() != 2 {
        return Err(Error::InvalidDimension(format!("expected a qubit, got dimension {}", psi.dim())));
    }
    let bloch = bloch_from_density(&psi.density())?.components();
    Ok(Prepared { a: psi.amps()[0], b: psi.amps()[1], magic: rom(&bloch), bloch })
}

fn magic_value(p: &UnitaryParams15, s: &Prepared) -> f64 {
    let e = evolve(p, s.a, s.b);
    (rom(&e.sys) - s.magic).abs().max((rom(&e.aux) - s.magic).abs())
}

fn state_value(p: &UnitaryParams15, s: &Prepared) -> f64 {
    let e = evolve(p, s.a, s.b);
    (1.0 - overlap(&s.bloch, &e.sys)).max(1.0 - overlap(&s.bloch, &e.aux))
}

/// `max(|R(rho_S) - R(psi)|, |R(rho_A) - R(psi)|)`.
pub fn objective_magic(p: &UnitaryParams15, psi: &PureState) -> Result<f64> {
    Ok(magic_value(p, &prepare(psi)?))
}

/// `max(1 - <psi|rho_S|psi>, 1 - <psi|rho_A|psi>)`.
pub fn objective_state(p: &UnitaryParams15, psi: &PureState) -> Result<f64> {
    Ok(state_value(p, &prepare(psi)?))
}

pub fn objective_value(objective: Objective, p: &UnitaryParams15, psi: &PureState) -> Result<f64> {
    match objective {
        Objective::Magic => objective_magic(p, psi),
        Objective::State => objective_state(p, psi),
    }
}

/// Searches `[0, 2 pi]^15` for a unitary minimising `objective` on `psi`.
///
/// Deterministic in `cfg`. The first population contains the identity.
pub fn isres_optimize(objective: Objective, psi: &PureState, cfg: &OptimizerConfig) -> Result<BroadcastOutcome> {
    cfg.validate()?;
    let prepared = prepare(psi)?;
    let mut rng = optimizer_rng(cfg.seed);
    let value = |x: &[f64]| {
        let p = UnitaryParams15::from_slice(x).expect("15 finite angles");
        match objective {
            Objective::Magic => magic_value(&p, &prepared),
            Objective::State => state_value(&p, &prepared),
        }
    };
    let anchor = [0.0; UnitaryParams15::DIM];
    let res = isres::minimize(
        value,
        UnitaryParams15::DIM,
        0.0,
        std::f64::consts::TAU,
        isres::EsSettings::for_population(cfg.population),
        cfg.epsilon,
        cfg.max_evals,
        cfg.restarts,
        Some(&anchor),
        &mut rng,
    );
    let params = UnitaryParams15::from_slice(&res.best_x)?;
    let e = evolve(&params, prepared.a, prepared.b);
    Ok(BroadcastOutcome {
        params,
        objective_value: res.best_f,
        sys_fidelity: overlap(&prepared.bloch, &e.sys).sqrt(),
        aux_fidelity: overlap(&prepared.bloch, &e.aux).sqrt(),
        sys_overlap: overlap(&prepared.bloch, &e.sys),
        aux_overlap: overlap(&prepared.bloch, &e.aux),
        sys_magic: rom(&e.sys),
        aux_magic: rom(&e.aux),
        input_magic: prepared.magic,
        magic_power: magic_power(&build_unitary(&params))?,
        evals_used: res.evals,
        converged: res.best_f <= cfg.epsilon,
    })
}

fn optimizer_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Haar input of sample `index`; it depends on `base_seed + index` only.
pub fn sample_state(base_seed: u64, index: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(index));
    haar_random_pure_with(2, &mut rng).expect("qubit")
}

/// Runs sample `index` of a batch: input from [`sample_state`], optimizer
/// seeded with `cfg.seed + index`.
pub fn run_sample(objective: Objective, cfg: &OptimizerConfig, index: u64) -> Result<BroadcastOutcome> {
    let psi = sample_state(cfg.seed, index);
    let local = OptimizerConfig { seed: cfg.seed.wrapping_add(index), ..*cfg };
    isres_optimize(objective, &psi, &local)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub objective: Objective,
    pub n_samples: usize,
    pub n_converged: usize,
    /// Mean of the system and auxiliary root fidelities; magic runs use converged samples only.
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    /// Same pooling for the overlaps `<psi|rho|psi>`.
    pub mean_overlap: f64,
    pub min_overlap: f64,
    pub mean_magic_power: f64,
    pub per_sample: Vec<BroadcastOutcome>,
}

impl BatchSummary {
    /// Aggregates in sample order.
    pub fn from_outcomes(objective: Objective, per_sample: Vec<BroadcastOutcome>) -> Result<Self> {
        if per_sample.is_empty() {
            return Err(Error::InvalidInput("no samples".into()));
        }
        let n = per_sample.len();
        let counted: Vec<&BroadcastOutcome> = per_sample
            .iter()
            .filter(|o| objective == Objective::State || o.converged)
            .collect();
        let pooled = |f: fn(&BroadcastOutcome) -> [f64; 2]| -> (f64, f64) {
            let v: Vec<f64> = counted.iter().flat_map(|o| f(o)).collect();
            if v.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                (v.iter().sum::<f64>() / v.len() as f64, v.iter().copied().fold(f64::INFINITY, f64::min))
            }
        };
        let (mean_fidelity, min_fidelity) = pooled(|o| [o.sys_fidelity, o.aux_fidelity]);
        let (mean_overlap, min_overlap) = pooled(|o| [o.sys_overlap, o.aux_overlap]);
        Ok(Self {
            objective,
            n_samples: n,
            n_converged: per_sample.iter().filter(|o| o.converged).count(),
            mean_fidelity,
            min_fidelity,
            mean_overlap,
            min_overlap,
            mean_magic_power: per_sample.iter().map(|o| o.magic_power).sum::<f64>() / n as f64,
            per_sample,
        })
    }

    pub fn convergence_rate(&self) -> f64 {
        self.n_converged as f64 / self.n_samples as f64
    }
}

/// Samples `0..n_samples` in parallel; results are identical to a serial run.
pub fn batch_experiment(n_samples: usize, objective: Objective, cfg: &OptimizerConfig) -> Result<BatchSummary> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    cfg.validate()?;
    let outcomes = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| run_sample(objective, cfg, i))
        .collect::<Result<Vec<_>>>()?;
    BatchSummary::from_outcomes(objective, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{apply_unitary, haar_random_pure, named_stabilizer_state, reduce_pure, t_state, tensor_pure, Subsystem};
    use crate::magic::rom_qubit;
    use rand::Rng;

    fn quick(seed: u64) -> OptimizerConfig {
        OptimizerConfig { seed, max_evals: 40_000, ..Default::default() }
    }

    #[test]
    fn evolve_matches_dense_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for s in 0..20 {
            let x: Vec<f64> = (0..15).map(|_| rng.random::<f64>() * 6.0).collect();
            let p = UnitaryParams15::from_slice(&x).unwrap();
            let psi = haar_random_pure(2, s).unwrap();
            let out = apply_unitary(&build_unitary(&p), &tensor_pure(&psi, &PureState::basis(2, 0).unwrap())).unwrap();
            let rs = bloch_from_density(&reduce_pure(&out, [2, 2], Subsystem::First).unwrap()).unwrap();
            let ra = bloch_from_density(&reduce_pure(&out, [2, 2], Subsystem::Second).unwrap()).unwrap();
            let e = evolve(&p, psi.amps()[0], psi.amps()[1]);
            for k in 0..3 {
                assert!((rs.components()[k] - e.sys[k]).abs() < 1e-12);
                assert!((ra.components()[k] - e.aux[k]).abs() < 1e-12);
            }
            let direct = rom_qubit(&reduce_pure(&out, [2, 2], Subsystem::Second).unwrap()).unwrap();
            assert!((direct - rom(&e.aux)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_objectives() {
        let id = UnitaryParams15::identity();
        let plus = named_stabilizer_state("+").unwrap();
        assert!(objective_magic(&id, &plus).unwrap().abs() < 1e-15);
        let t = t_state();
        assert!((objective_magic(&id, &t).unwrap() - (3f64.sqrt() - 1.0)).abs() < 1e-12);
        let psi = haar_random_pure(2, 8).unwrap();
        let p0 = psi.amps()[0].norm_sqr();
        assert!((objective_state(&id, &psi).unwrap() - (1.0 - p0)).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        for bad in [
            OptimizerConfig { population: 3, ..Default::default() },
            OptimizerConfig { population: 9, ..Default::default() },
            OptimizerConfig { epsilon: 0.0, ..Default::default() },
            OptimizerConfig { max_evals: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn stabilizer_input_converges_immediately() {
        let zero = PureState::basis(2, 0).unwrap();
        let out = isres_optimize(Objective::Magic, &zero, &quick(1)).unwrap();
        assert!(out.converged);
        assert_eq!(out.evals_used, 1);
    }

    #[test]
    fn t_input_magic_objective_converges() {
        let out = isres_optimize(Objective::Magic, &t_state(), &quick(3)).unwrap();
        assert!(out.converged, "{}", out.objective_value);
        assert!((out.sys_magic - 3f64.sqrt()).abs() <= 1e-4);
        assert!((out.aux_magic - 3f64.sqrt()).abs() <= 1e-4);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let psi = haar_random_pure(2, 21).unwrap();
        let cfg = OptimizerConfig { seed: 5, max_evals: 5_000, ..Default::default() };
        let a = isres_optimize(Objective::State, &psi, &cfg).unwrap();
        let b = isres_optimize(Objective::State, &psi, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn batch_matches_serial_runs() {
        let cfg = OptimizerConfig { seed: 100, max_evals: 3_000, ..Default::default() };
        let batch = batch_experiment(4, Objective::Magic, &cfg).unwrap();
        for (i, o) in batch.per_sample.iter().enumerate() {
            assert_eq!(o, &run_sample(Objective::Magic, &cfg, i as u64).unwrap());
        }
        assert!(batch_experiment(0, Objective::Magic, &cfg).is_err());
    }

    #[test]
    fn outcome_json_round_trip() {
        let cfg = OptimizerConfig { max_evals: 500, ..Default::default() };
        let o = run_sample(Objective::Magic, &cfg, 0).unwrap();
        let text = serde_json::to_string(&o).unwrap();
        let back: BroadcastOutcome = serde_json::from_str(&text).unwrap();
        assert_eq!(o, back);
    }

    #[test]
    fn known_input_is_copied_by_a_local_rotation() {
        // U = I (x) V with V|0> = |psi> gives |psi>|psi>.
        let psi = haar_random_pure(2, 13).unwrap();
        let a = psi.amps();
        let theta = 2.0 * a[1].norm().atan2(a[0].norm());
        let zeta = a[1].arg() - a[0].arg();
        let mut p = UnitaryParams15::identity();
        p.su2_angles[3] = [zeta, theta, 0.0];
        assert!(objective_state(&p, &psi).unwrap() < 1e-12);
        let out = isres_optimize(Objective::State, &psi, &quick(2)).unwrap();
        assert!(out.converged);
    }

    #[test]
    fn objective_parses() {
        assert_eq!("magic".parse::<Objective>().unwrap(), Objective::Magic);
        assert_eq!("state".parse::<Objective>().unwrap(), Objective::State);
        assert!("x".parse::<Objective>().is_err());
    }
}
