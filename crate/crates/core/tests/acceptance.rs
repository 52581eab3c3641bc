//! End-to-end acceptance checks. Each test writes one `PASS`/`FAIL` line to
//! stderr (bypassing the harness capture) before asserting.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::io::Write;
use std::time::{Duration, Instant};

use magicast::cloners::{
    bh_output, computational_input, eta_max, m_ratio, theorem2_falsify, wz_output_for_input, BhParams,
    BroadcasterSpec, WzParams,
};
use magicast::magic::{rom_qubit, sre2_pure};
use magicast::optimize::{batch_experiment, Objective, OptimizerConfig};
use magicast::qstate::{bloch_from_density, h_state, named_stabilizer_state, t_state, STABILIZER_LABELS};
use magicast::stabkit::stabilizer_states;
use magicast::verify::{run_suite, Suite};

fn report(id: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[acceptance] {tag} criterion {id}: {detail}");
}

#[test]
fn criterion_01_lemma1_equivalence() {
    let start = Instant::now();
    let r = run_suite(Suite::Lemma1, 100_000, 1).unwrap();
    let elapsed = start.elapsed();
    let pass = r.max_violation <= 1e-8 && elapsed < Duration::from_secs(120);
    report(
        "1",
        pass,
        format!("{} states, max |R - R_lp| = {:.3e}, {:.1} s", r.samples, r.max_violation, elapsed.as_secs_f64()),
    );
    assert!(pass);
}

#[test]
fn criterion_02_named_state_magic() {
    let t = rom_qubit(&t_state().density()).unwrap();
    let h = rom_qubit(&h_state().density()).unwrap();
    let stab = STABILIZER_LABELS
        .iter()
        .map(|l| (rom_qubit(&named_stabilizer_state(l).unwrap().density()).unwrap() - 1.0).abs())
        .fold(0.0f64, f64::max);
    let (dt, dh) = ((t - 3f64.sqrt()).abs(), (h - 2f64.sqrt()).abs());
    let pass = dt <= 1e-12 && dh <= 1e-12 && stab <= 1e-12;
    report("2", pass, format!("|R(T) - sqrt3| = {dt:.1e}, |R(H) - sqrt2| = {dh:.1e}, stabilizers {stab:.1e}"));
    assert!(pass);
}

#[test]
fn criterion_03_theorem1_ingredients() {
    let clifford = run_suite(Suite::Clifford, 1_000, 3).unwrap();
    let additivity = run_suite(Suite::Additivity, 1_000, 3).unwrap();
    let monotone = run_suite(Suite::Monotone, 10_000, 3).unwrap();
    let pass = clifford.max_violation <= 1e-10 && additivity.max_violation <= 1e-10 && monotone.max_violation <= 1e-9;
    report(
        "3",
        pass,
        format!(
            "clifford {:.1e}, additivity {:.1e}, partial-trace monotonicity excess {:.1e}",
            clifford.max_violation, additivity.max_violation, monotone.max_violation
        ),
    );
    assert!(pass);
}

fn zeta_grid() -> Vec<f64> {
    (0..720).map(|k| TAU * k as f64 / 720.0).collect()
}

#[test]
fn criterion_04_theorem2_falsification() {
    let r = theorem2_falsify(&BroadcasterSpec::t_type(), FRAC_PI_4, &zeta_grid()).unwrap();
    let pass = r.max_gap > 0.1 && r.max_closed_form_error <= 1e-9 && r.output_spread <= 1e-12;
    report(
        "4",
        pass,
        format!(
            "max gap {:.6} at zeta {:.4}, closed-form error {:.1e}, output spread {:.1e}",
            r.max_gap, r.worst_zeta, r.max_closed_form_error, r.output_spread
        ),
    );
    assert!(pass);
}

/// The superposition formula exactly as printed: `2|a| + |b|`.
fn printed_superposition_rom(theta: f64, zeta: f64) -> f64 {
    let (c, s) = (theta.cos(), theta.sin());
    let a = c / 3f64.sqrt() + s * zeta.cos() / 6f64.sqrt() - s * zeta.sin() / 2f64.sqrt();
    let b = (c - 2f64.sqrt() * s * zeta.cos()) / 3f64.sqrt();
    2.0 * a.abs() + b.abs()
}

#[test]
fn criterion_04b_printed_superposition_formula() {
    let r = theorem2_falsify(&BroadcasterSpec::t_type(), FRAC_PI_4, &zeta_grid()).unwrap();
    let worst = r
        .points
        .iter()
        .map(|p| (printed_superposition_rom(p.theta, p.zeta) - p.input_magic).abs())
        .fold(0.0f64, f64::max);
    let pass = worst <= 1e-9;
    report("4b", pass, format!("printed closed form vs rom of the built state: max deviation {worst:.6}"));
    assert!(pass);
}

#[test]
fn criterion_05_theorem3_bound() {
    let r = run_suite(Suite::Theorem3, 10_000, 5).unwrap();
    let pass = r.max_violation <= 1e-9;
    report("5", pass, format!("{} specs, max excess over reference {:.1e}", r.samples, r.max_violation));
    assert!(pass);
}

#[test]
fn criterion_06_wootters_zurek_overproduction() {
    let expected = (3.0 + 6f64.sqrt()).sqrt() / 2f64.sqrt();
    let out = rom_qubit(&wz_output_for_input(&WzParams::t_reference(), &h_state()).unwrap()).unwrap();
    let input = rom_qubit(&h_state().density()).unwrap();
    let pass = (out - expected).abs() <= 1e-6 && out > input;
    report(
        "6",
        pass,
        format!("output R = {out:.6} (expected {expected:.6}), input R = {input:.6}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07a_universal_cloner_scaling() {
    let p = BhParams::new(1.0 / 6.0, eta_max(1.0 / 6.0)).unwrap();
    let mut worst = 0.0f64;
    for i in 0..50 {
        for j in 0..50 {
            let (theta, zeta) = (PI * i as f64 / 49.0, TAU * j as f64 / 50.0);
            let out = bloch_from_density(&bh_output(&p, theta, zeta)).unwrap();
            let expected = computational_input(theta, zeta).scaled(2.0 / 3.0).unwrap();
            worst = worst.max(out.max_abs_diff(&expected));
        }
    }
    let pass = worst <= 1e-12;
    report("7a", pass, format!("xi = 1/6 gives eta = {:.15}, max Bloch deviation {worst:.1e}", p.eta()));
    assert!(pass);
}

#[test]
fn criterion_07b_ratio_at_equator() {
    let p = BhParams::saturated(0.25).unwrap();
    let worst = (0..64)
        .map(|k| (m_ratio(&p, FRAC_PI_2, TAU * k as f64 / 64.0) - 1.0 / 2f64.sqrt()).abs())
        .fold(0.0f64, f64::max);
    let pass = worst <= 1e-12;
    report("7b", pass, format!("M_ratio(pi/2, xi = 1/4) off 1/sqrt2 by {worst:.1e}"));
    assert!(pass);
}

fn ratio_interval(xi: f64, zetas: &[f64]) -> (f64, f64) {
    let p = BhParams::saturated(xi).unwrap();
    zetas
        .iter()
        .map(|&z| m_ratio(&p, 0.1, z))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

#[test]
fn criterion_07c_low_magic_ratio_window() {
    let zetas: Vec<f64> = (0..3600).map(|k| TAU * k as f64 / 3600.0).collect();
    let (lo, hi) = ratio_interval(0.02, &zetas);
    let (fam_lo, fam_hi) = (1..=200)
        .map(|k| ratio_interval(0.02 * k as f64 / 200.0, &zetas))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| (a.min(c), b.max(d)));
    let pass = (lo - 0.88).abs() <= 0.01 && (hi - 0.91).abs() <= 0.01;
    report(
        "7c",
        pass,
        format!("theta = 0.1, xi = 0.02: M_ratio in [{lo:.4}, {hi:.4}]; over xi in (0, 0.02]: [{fam_lo:.4}, {fam_hi:.4}]"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_broadcasting_experiment() {
    let start = Instant::now();
    let cfg = OptimizerConfig::default();
    let magic = batch_experiment(200, Objective::Magic, &cfg).unwrap();
    let state = batch_experiment(200, Objective::State, &cfg).unwrap();
    let elapsed = start.elapsed();
    let within_budget = magic.per_sample.iter().all(|o| o.evals_used <= 200_000);
    let power_gap = magic.mean_magic_power - state.mean_magic_power;
    let pass = magic.convergence_rate() >= 0.95
        && within_budget
        && (0.60..=0.72).contains(&magic.mean_fidelity)
        && power_gap >= 0.02
        && magic.min_fidelity < 0.05
        && elapsed < Duration::from_secs(7200);
    report(
        "8",
        pass,
        format!(
            "converged {}/{}, mean fidelity {:.4} (overlap {:.4}), min fidelity {:.4}, magic power {:.4} vs {:.4} (gap {:.4}), {:.1} s",
            magic.n_converged,
            magic.n_samples,
            magic.mean_fidelity,
            magic.mean_overlap,
            magic.min_fidelity,
            magic.mean_magic_power,
            state.mean_magic_power,
            power_gap,
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_geometry_certificate() {
    let r = run_suite(Suite::Geometry, 1_000, 9).unwrap();
    let pass = r.max_violation == 0.0;
    report("9", pass, format!("{} instances against a 10^4-point scan: {}", r.samples, r.detail));
    assert!(pass);
}

#[test]
fn criterion_10_faithfulness() {
    let mut stab = 0.0f64;
    let mut count = 0;
    for n in [1, 2] {
        for s in stabilizer_states(n).unwrap().states() {
            stab = stab.max(sre2_pure(s, n).unwrap().abs());
            count += 1;
        }
    }
    let r = run_suite(Suite::Faithfulness, 100, 10).unwrap();
    let pass = count == 66 && stab <= 1e-12 && r.max_violation <= 1e-10;
    report(
        "10",
        pass,
        format!("max M2 over {count} stabilizer states {stab:.1e}; 100 Clifford words: {}", r.detail),
    );
    assert!(pass);
}
