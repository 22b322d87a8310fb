use std::f64::consts::PI;

use diamond_core::entanglement::{concurrence_pure, fidelity};
use diamond_core::evolution::{evolve_xplus_oracle, xplus_initial_state, Propagator};
use diamond_core::hamiltonian::{build_hamiltonian, ClusterParams};
use diamond_core::hilbert::{basis_index, phase_distance, BasisIndex, Ket, SpinLabel};
use diamond_core::measurement::{direction_basis, measure_pair, outcome_ket, MeasurementDirection, PairOutcome};
use diamond_core::protocols::{
    bell_conditions, execute_recipe, prepare_bell_on_centrals, prepare_bell_on_sides, prepare_on_sides, BellRoute,
    BellTarget, RecipeOptions,
};
use diamond_core::sweep::{run_sweep, Quantity, SweepConfig};
use diamond_core::{Pair, StateVector16, TwoQubitState, C64};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ClusterParams> {
    (-5.0..5.0, -5.0..5.0, -5.0..5.0, -5.0..5.0, -5.0..5.0).prop_map(|(j, jz, j0, h, hp)| ClusterParams {
        j,
        jz,
        j0,
        h,
        hp,
    })
}

fn state16() -> impl Strategy<Value = StateVector16> {
    prop::array::uniform16((-1.0..1.0, -1.0..1.0))
        .prop_filter_map("nonzero", |a| StateVector16::from_amplitudes(a.map(|(r, i)| C64::new(r, i))).normalize().ok())
}

fn pair_state() -> impl Strategy<Value = TwoQubitState> {
    prop::array::uniform4((-1.0..1.0, -1.0..1.0))
        .prop_filter_map("nonzero", |a| TwoQubitState::from_array(a.map(|(r, i)| C64::new(r, i))).normalize().ok())
}

fn direction() -> impl Strategy<Value = MeasurementDirection> {
    (0.0..PI, 0.0..2.0 * PI).prop_map(|(th, ph)| MeasurementDirection::new(th, ph).unwrap())
}

#[test]
fn basis_index_round_trip() {
    for idx in BasisIndex::all() {
        let [s1, s2, sa, sb] = idx.spins();
        assert_eq!(basis_index(s1, s2, sa, sb), idx);
    }
    assert_eq!(basis_index(SpinLabel::Down, SpinLabel::Up, SpinLabel::Up, SpinLabel::Down).value(), 0b1001);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_is_traceless(p in params()) {
        prop_assert!(build_hamiltonian(&p).trace().norm() < 1e-12);
    }

    #[test]
    fn evolution_is_unitary_composable_and_conserves_energy(
        p in params(), psi in state16(), t1 in 0.0..5.0, t2 in 0.0..5.0
    ) {
        let h = build_hamiltonian(&p);
        let u = Propagator::new(&h);
        let a = u.evolve(&psi, t1);
        prop_assert!((a.norm() - 1.0).abs() < 1e-12);
        let composed = u.evolve(&a, t2);
        let direct = u.evolve(&psi, t1 + t2);
        prop_assert!((composed.as_vector() - direct.as_vector()).norm() < 1e-11);
        prop_assert!((h.expectation(&a) - h.expectation(&psi)).abs() < 1e-11);
    }

    #[test]
    fn measurement_is_complete_and_reconstructs(psi in state16(), d in direction(), sides in any::<bool>()) {
        let pair = if sides { Pair::Sides } else { Pair::Centrals };
        let records = measure_pair(&psi, pair, &d).unwrap();
        let total: f64 = records.iter().map(|r| r.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let mut rebuilt = StateVector16::zero();
        for r in records.iter().filter(|r| r.is_reachable()) {
            let weighted = r.post_state().unwrap().scale(C64::new(r.probability.sqrt(), 0.0));
            let ket = outcome_ket(&d, r.outcome);
            let piece = match pair {
                Pair::Sides => StateVector16::product(&ket, &weighted),
                Pair::Centrals => StateVector16::product(&weighted, &ket),
            };
            rebuilt = StateVector16::from_vector(rebuilt.as_vector() + piece.as_vector());
        }
        prop_assert!(phase_distance(&rebuilt, &psi) < 1e-10);
    }

    #[test]
    fn mixed_outcomes_coincide(p in params(), d in direction(), t in 0.0..6.0) {
        let records = measure_pair(&evolve_xplus_oracle(&p, t), Pair::Sides, &d).unwrap();
        let (pm, mp) = (&records[PairOutcome::PM.index()], &records[PairOutcome::MP.index()]);
        prop_assert!((pm.probability - mp.probability).abs() < 1e-12);
        if pm.probability > 1e-6 {
            prop_assert!(phase_distance(pm.post_state().unwrap(), mp.post_state().unwrap()) < 1e-10);
        }
    }

    #[test]
    fn opposite_azimuth_swaps_plus_and_minus(p in params(), t in 0.0..6.0) {
        let psi = evolve_xplus_oracle(&p, t);
        let d = bell_conditions(p.h, t);
        let flipped = MeasurementDirection::new(PI / 2.0, p.h * t).unwrap();
        let a = measure_pair(&psi, Pair::Sides, &d).unwrap();
        let b = measure_pair(&psi, Pair::Sides, &flipped).unwrap();
        for (x, y) in [(PairOutcome::PP, PairOutcome::MM), (PairOutcome::MM, PairOutcome::PP), (PairOutcome::PM, PairOutcome::MP)] {
            let (x, y) = (&a[x.index()], &b[y.index()]);
            prop_assert!((x.probability - y.probability).abs() < 1e-12);
            if x.probability > 1e-6 {
                prop_assert!(phase_distance(x.post_state().unwrap(), y.post_state().unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn concurrence_ignores_local_rotations(s in pair_state(), d1 in direction(), d2 in direction()) {
        let rotate = |d: &MeasurementDirection| {
            let (plus, minus) = direction_basis(d);
            move |q: [C64; 2]| [plus[0] * q[0] + minus[0] * q[1], plus[1] * q[0] + minus[1] * q[1]]
        };
        let (r1, r2) = (rotate(&d1), rotate(&d2));
        let mut out = [C64::new(0.0, 0.0); 4];
        for (k, amp) in s.to_array().iter().enumerate() {
            let a = r1(if k >> 1 == 0 { [C64::new(1.0, 0.0), C64::new(0.0, 0.0)] } else { [C64::new(0.0, 0.0), C64::new(1.0, 0.0)] });
            let b = r2(if k & 1 == 0 { [C64::new(1.0, 0.0), C64::new(0.0, 0.0)] } else { [C64::new(0.0, 0.0), C64::new(1.0, 0.0)] });
            for i in 0..2 {
                for j in 0..2 {
                    out[2 * i + j] += amp * a[i] * b[j];
                }
            }
        }
        let rotated = TwoQubitState::from_array(out);
        prop_assert!((concurrence_pure(&rotated).value() - concurrence_pure(&s).value()).abs() < 1e-12);
    }

    #[test]
    fn recipes_deliver_what_they_promise(
        p in params().prop_filter("coupled", |p| p.j0.abs() > 0.2),
        target in prop::sample::select(vec![BellTarget::PhiPlus, BellTarget::PhiMinus, BellTarget::PsiPlus]),
        route in prop::sample::select(vec![BellRoute::Direct, BellRoute::Mixed, BellRoute::MixedLate]),
    ) {
        let Ok(recipe) = prepare_bell_on_centrals(&p, target, RecipeOptions { route, n: None }) else {
            prop_assert!(target == BellTarget::PsiPlus && route != BellRoute::Direct);
            return Ok(());
        };
        let run = execute_recipe(&recipe).unwrap();
        prop_assert!((run.fidelity - recipe.expected_fidelity).abs() < 1e-9);
        prop_assert!((run.probability - recipe.expected_probability).abs() < 1e-9);
        let total: f64 = run.records.iter().map(|r| r.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(fidelity(&run.post_state, &target.state()).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn isotropic_field_swap_mirrors_pairs(p in params(), d in direction(), t in 0.0..6.0) {
        let p = ClusterParams { jz: p.j, ..p };
        let sides = prepare_on_sides(&p, &d, t).unwrap();
        let centrals = measure_pair(&evolve_xplus_oracle(&p.swap_fields(), t), Pair::Sides, &d).unwrap();
        for (a, b) in sides.iter().zip(&centrals) {
            prop_assert!((a.probability - b.probability).abs() < 1e-12);
            if a.probability > 1e-6 {
                prop_assert!(phase_distance(a.post_state().unwrap(), b.post_state().unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn side_recipes_prepare_the_sides(
        j in -3.0..3.0f64, j0 in 0.3..3.0f64, h in -3.0..3.0f64, hp in -3.0..3.0f64,
        target in prop::sample::select(vec![BellTarget::PhiPlus, BellTarget::PhiMinus, BellTarget::PsiPlus]),
    ) {
        let p = ClusterParams { j, jz: j, j0, h, hp };
        let recipe = prepare_bell_on_sides(&p, target, RecipeOptions::default()).unwrap();
        prop_assert_eq!(recipe.pair_prepared, Pair::Sides);
        let run = execute_recipe(&recipe).unwrap();
        prop_assert!(run.fidelity > 1.0 - 1e-9);
        prop_assert!((run.probability - recipe.expected_probability).abs() < 1e-9);
    }

    #[test]
    fn sweeps_close_the_grid_and_repeat(n1 in 2usize..12, n2 in 2usize..12, dphi in 0.0..PI) {
        let cfg = SweepConfig::new(Quantity::ConcurrenceXY)
            .axis("Jt", 0.0, 4.0 * PI, n1)
            .axis("Jzt", 0.0, 4.0 * PI, n2)
            .fix("dphi", dphi);
        let a = run_sweep(&cfg).unwrap();
        prop_assert_eq!(a.rows.len(), n1 * n2);
        prop_assert_eq!(a.to_csv(), run_sweep(&cfg).unwrap().to_csv());
        prop_assert!(a.max_cross_deviation < 1e-10);
    }
}

#[test]
fn xplus_state_is_normalized() {
    assert!(xplus_initial_state().is_normalized(1e-15));
}
