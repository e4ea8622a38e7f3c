use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use procmat::ensembles::{random_covariant_coefficients, random_extension, random_valid_process};
use procmat::game::{born, random_cptp_instrument};
use procmat::linalg::{random_hermitian, RandomSource};
use procmat::process::is_definite_order;
use procmat::process::{canonical_layout, validate, CANONICAL};
use procmat::sector::{
    basis_projectors, decompose, project_coefficients, reconstruct, VERTEX_ORDERS,
};
use procmat::twirl::{reduce_and_check, wire_twirl, WireAssignment};
use procmat::{Operator, SubsystemLayout};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn dim() -> impl Strategy<Value = usize> {
    prop_oneof![3 => Just(2usize), 1 => Just(3usize)]
}

fn hermitian_on_canonical(d: usize, seed: u64) -> Operator {
    random_hermitian(
        &canonical_layout(d).unwrap(),
        &mut RandomSource::new(seed).rng(),
    )
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn partial_trace_preserves_trace(seed in any::<u64>(), d0 in 1usize..4, d1 in 1usize..4, d2 in 1usize..3) {
        let layout = SubsystemLayout::new(["x", "y", "z"], [d0, d1, d2]).unwrap();
        let op = random_hermitian(&layout, &mut RandomSource::new(seed).rng());
        for over in [&["x"][..], &["y", "z"][..], &["z", "x"][..]] {
            let reduced = op.partial_trace(over).unwrap();
            prop_assert!((reduced.trace() - op.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn permutation_preserves_spectrum(seed in any::<u64>(), d0 in 1usize..4, d1 in 1usize..4, d2 in 1usize..3) {
        let layout = SubsystemLayout::new(["x", "y", "z"], [d0, d1, d2]).unwrap();
        let op = random_hermitian(&layout, &mut RandomSource::new(seed).rng());
        let before = op.hermitian_eigenvalues();
        let permuted = op.permute_subsystems(&["z", "x", "y"]).unwrap();
        let after = permuted.hermitian_eigenvalues();
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let back = permuted.permute_subsystems(&["x", "y", "z"]).unwrap();
        prop_assert_eq!(back, op);
    }

    #[test]
    fn trace_and_replace_is_idempotent(seed in any::<u64>(), d in dim()) {
        let x = hermitian_on_canonical(d, seed);
        for label in CANONICAL {
            let once = x.trace_and_replace(label).unwrap();
            let twice = once.trace_and_replace(label).unwrap();
            prop_assert!(once.max_abs_diff(&twice).unwrap() < 1e-12);
        }
    }

    #[test]
    fn twirl_is_an_orthogonal_projection(seed in any::<u64>(), d in dim()) {
        let wires = WireAssignment::canonical(d);
        let a = hermitian_on_canonical(d, seed);
        let b = hermitian_on_canonical(d, seed.wrapping_add(1));
        let ta = wire_twirl(&a, &wires).unwrap();
        let tb = wire_twirl(&b, &wires).unwrap();

        let tta = wire_twirl(&ta, &wires).unwrap();
        prop_assert!(ta.max_abs_diff(&tta).unwrap() <= 1e-12);

        let lhs = ta.hs_inner(&b).unwrap();
        let rhs = a.hs_inner(&tb).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10);

        prop_assert!((ta.trace() - a.trace()).norm() <= 1e-12);
    }

    #[test]
    fn twirl_image_is_the_projector_algebra(seed in any::<u64>(), d in dim()) {
        let x = hermitian_on_canonical(d, seed);
        let t = wire_twirl(&x, &WireAssignment::canonical(d)).unwrap();
        let c = project_coefficients(&t, d).unwrap();
        let basis = basis_projectors(d).unwrap();
        let mut span = Operator::zeros(t.layout().clone());
        for (coef, p) in c.as_array().iter().zip(&basis) {
            span += &p.scale(*coef);
        }
        prop_assert!(span.max_abs_diff(&t).unwrap() <= 1e-12);
    }

    #[test]
    fn twirl_preserves_validity(seed in any::<u64>(), d in dim()) {
        let w = random_valid_process(d, &mut RandomSource::new(seed).rng()).unwrap();
        let t = wire_twirl(w.op(), &WireAssignment::canonical(d)).unwrap();
        let t = procmat::ProcessMatrix::new(t).unwrap();
        prop_assert!(validate(&t, 1e-9).valid());
    }

    #[test]
    fn reduction_commutes_with_twirl(seed in any::<u64>(), d in dim(), r in 1usize..4) {
        let ext = random_extension(d, r, &mut RandomSource::new(seed).rng()).unwrap();
        prop_assert!(reduce_and_check(&ext, &WireAssignment::canonical(d), 1e-10).unwrap());
    }

    #[test]
    fn covariant_processes_decompose(seed in any::<u64>(), d in dim()) {
        let c = random_covariant_coefficients(d, &mut RandomSource::new(seed).rng());
        let w = reconstruct(&c).unwrap();
        let dec = decompose(&w).unwrap();
        prop_assert!(dec.weights.iter().all(|&p| p >= -1e-12));
        assert_abs_diff_eq!(dec.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
        prop_assert!(dec.reconstruction_residual <= 1e-10);
        for (v, order) in dec.vertices.iter().zip(VERTEX_ORDERS) {
            prop_assert!(is_definite_order(v, order, 1e-9).unwrap());
        }
    }

    #[test]
    fn born_rule_is_normalized(seed in any::<u64>(), d in dim(), na in 1usize..4, nb in 1usize..4) {
        let src = RandomSource::new(seed);
        let w = random_valid_process(d, &mut src.fork(0).rng()).unwrap();
        let a = random_cptp_instrument(d, na, &mut src.fork(1).rng()).unwrap();
        let b = random_cptp_instrument(d, nb, &mut src.fork(2).rng()).unwrap();
        let table = born(&w, &a, &b).unwrap();
        assert_abs_diff_eq!(table.total(), 1.0, epsilon = 1e-9);
        prop_assert!(table.probs.iter().flatten().all(|&p| p >= -1e-12));
    }

    #[test]
    fn json_round_trip_is_exact(seed in any::<u64>(), d0 in 1usize..4, d1 in 1usize..4) {
        let layout = SubsystemLayout::new(["p", "q"], [d0, d1]).unwrap();
        let op = random_hermitian(&layout, &mut RandomSource::new(seed).rng()).scale(1e-3);
        let s = op.to_json();
        let back = Operator::from_json(&s).unwrap();
        prop_assert_eq!(back.to_json(), s);
        prop_assert_eq!(back, op);
    }
}
