use magicast::cloners::{
    bh_output, maximal_magic_superposition_rom, unrestricted_broadcast, wz_broadcast_check, wz_output, BhParams,
    BroadcasterSpec, WzParams,
};
use magicast::magic::{rom_lp_oracle, rom_qubit, sre2_pure, witness_d};
use magicast::optimize::{build_unitary, isres_optimize, Objective, OptimizerConfig, UnitaryParams15};
use magicast::qstate::{
    apply_unitary, bloch_from_density, density_from_bloch, haar_random_pure, random_mixed_with, superpose, t_perp_state,
    t_state, tensor_pure, unitarity_defect, BlochVector, PureState,
};
use magicast::stabkit::{clifford_group_1q, line_polytope_intersections, stabilizer_states};
use magicast::verify::scan_crossings;
use magicast::C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn bloch_in_ball() -> impl Strategy<Value = BlochVector> {
    (0.0..=1.0f64, 0.0..PI, 0.0..TAU).prop_map(|(r, th, ph)| {
        BlochVector::new(r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()).unwrap()
    })
}

fn qubit() -> impl Strategy<Value = PureState> {
    any::<u64>().prop_map(|s| haar_random_pure(2, s).unwrap())
}

fn perp(psi: &PureState) -> PureState {
    let a = psi.amps();
    PureState::normalized(vec![-a[1].conj(), a[0].conj()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bloch_density_round_trip(b in bloch_in_ball()) {
        let back = bloch_from_density(&density_from_bloch(&b)).unwrap();
        prop_assert!(back.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn orthogonal_pairs_have_opposite_bloch_vectors(psi in qubit()) {
        let a = bloch_from_density(&psi.density()).unwrap();
        let b = bloch_from_density(&perp(&psi).density()).unwrap();
        prop_assert!(a.max_abs_diff(&-b) <= 1e-10);
        prop_assert!((a.l1_norm() - b.l1_norm()).abs() <= 1e-10);
    }

    #[test]
    fn lp_oracle_matches_closed_form(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed_with(2, &mut rng).unwrap();
        prop_assert!((rom_qubit(&rho).unwrap() - rom_lp_oracle(&rho).unwrap()).abs() <= 1e-8);
        let pure = haar_random_pure(2, seed).unwrap().density();
        prop_assert!((rom_qubit(&pure).unwrap() - rom_lp_oracle(&pure).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn single_qubit_cliffords_preserve_magic(psi in qubit(), k in 0usize..24) {
        let c = &clifford_group_1q()[k];
        let out = apply_unitary(c, &psi).unwrap();
        prop_assert!((sre2_pure(&out, 1).unwrap() - sre2_pure(&psi, 1).unwrap()).abs() <= 1e-10);
        prop_assert!((rom_qubit(&out.density()).unwrap() - rom_qubit(&psi.density()).unwrap()).abs() <= 1e-10);
        prop_assert!((witness_d(&out.density(), 1).unwrap() - witness_d(&psi.density(), 1).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn sre2_is_additive(a in qubit(), b in qubit()) {
        let joint = sre2_pure(&tensor_pure(&a, &b), 2).unwrap();
        prop_assert!((joint - sre2_pure(&a, 1).unwrap() - sre2_pure(&b, 1).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn robustness_is_convex(s1 in any::<u64>(), s2 in any::<u64>(), w in 0.0..=1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(s1);
        let a = random_mixed_with(2, &mut rng).unwrap();
        let b = haar_random_pure(2, s2).unwrap().density();
        let mix = rom_qubit(&a.mix(w, &b, 1.0 - w).unwrap()).unwrap();
        prop_assert!(mix <= w * rom_qubit(&a).unwrap() + (1.0 - w) * rom_qubit(&b).unwrap() + 1e-12);
    }

    #[test]
    fn sre2_is_faithful_away_from_stabilizers(psi in qubit()) {
        let stab = stabilizer_states(1).unwrap();
        let dist = stab
            .states()
            .iter()
            .map(|s| (1.0 - s.inner(&psi).unwrap().norm_sqr()).max(0.0).sqrt())
            .fold(f64::INFINITY, f64::min);
        prop_assume!(dist > 1e-2);
        prop_assert!(sre2_pure(&psi, 1).unwrap() > 1e-6);
    }

    #[test]
    fn line_crossings_lie_on_the_surface_and_match_a_scan(
        b0 in bloch_in_ball(),
        b1 in bloch_in_ball(),
        r in 1.0..1.7f64,
    ) {
        let ts = line_polytope_intersections(&b0, &b1, r).unwrap();
        for &t in &ts {
            prop_assert!((0.0..=1.0).contains(&t));
            prop_assert!((b0.lerp(&b1, t).l1_norm() - r).abs() <= 1e-10);
        }
        let points = 10_000;
        let cell = 1.0 / (points - 1) as f64;
        for k in scan_crossings(&b0, &b1, r, points) {
            let lo = k as f64 * cell;
            prop_assert!(
                ts.iter().any(|&t| t >= lo - cell && t <= lo + 2.0 * cell),
                "scan crossing near {lo} missed; exact {ts:?}"
            );
        }
    }

    #[test]
    fn closed_form_superposition_magic(theta in 0.0..PI, zeta in 0.0..TAU) {
        let chi = superpose(&t_state(), &t_perp_state(), theta, zeta).unwrap();
        let direct = rom_qubit(&chi.density()).unwrap();
        prop_assert!((maximal_magic_superposition_rom(theta, zeta) - direct).abs() <= 1e-9);
    }

    #[test]
    fn broadcast_outputs_never_exceed_reference(seed in any::<u64>(), w in 0.0..=1.0f64, phase in 0.0..TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = BroadcasterSpec::random_with(&mut rng);
        let (sys, aux) =
            unrestricted_broadcast(&spec, C64::new(w.sqrt(), 0.0), C64::from_polar((1.0 - w).sqrt(), phase)).unwrap();
        prop_assert!(rom_qubit(&aux).unwrap() <= spec.reference_magic() + 1e-9);
        prop_assert!(rom_qubit(&sys).unwrap() <= spec.reference_magic() + 1e-9);
    }

    #[test]
    fn universal_cloner_shrinks_by_two_thirds(theta in 0.0..PI, zeta in 0.0..TAU) {
        let out = bloch_from_density(&bh_output(&BhParams::universal(), theta, zeta)).unwrap();
        let input = BlochVector::new(theta.sin() * zeta.cos(), theta.sin() * zeta.sin(), theta.cos()).unwrap();
        prop_assert!(out.max_abs_diff(&input.scaled(2.0 / 3.0).unwrap()) <= 1e-12);
    }

    #[test]
    fn wz_perfect_means_equal_magic(g in 0.0..PI, gp in 0.0..TAU, theta in 0.0..PI, zeta in 0.0..TAU) {
        let p = WzParams::new(g, gp).unwrap();
        let check = wz_broadcast_check(&p, theta, zeta);
        if check.perfect {
            let out = rom_qubit(&wz_output(&p, theta, zeta)).unwrap();
            prop_assert!((out - check.input_magic).abs() <= 1e-9);
        }
    }

    #[test]
    fn parameterized_unitaries_are_unitary(x in proptest::collection::vec(0.0..TAU, 15)) {
        let u = build_unitary(&UnitaryParams15::from_slice(&x).unwrap());
        prop_assert!(unitarity_defect(&u) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn optimizer_is_deterministic_and_converged_outcomes_meet_both_conditions(seed in any::<u64>()) {
        let psi = haar_random_pure(2, seed).unwrap();
        let cfg = OptimizerConfig { seed, max_evals: 20_000, ..Default::default() };
        let a = isres_optimize(Objective::Magic, &psi, &cfg).unwrap();
        let b = isres_optimize(Objective::Magic, &psi, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        if a.converged {
            prop_assert!(a.objective_value <= cfg.epsilon);
            prop_assert!((a.sys_magic - a.input_magic).abs() <= cfg.epsilon);
            prop_assert!((a.aux_magic - a.input_magic).abs() <= cfg.epsilon);
        }
    }
}
