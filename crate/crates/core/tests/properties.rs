use aamr_core::operator::reflected_step;
use aamr_core::{MonotoneOperator, Vector};
use proptest::prelude::*;
use proptest::test_runner::Config as ProptestConfig;

const DIM: usize = 3;

fn vector(dim: usize) -> impl Strategy<Value = Vector> {
    proptest::collection::vec(-10.0f64..10.0, dim).prop_map(|c| Vector::new(c).unwrap())
}

/// Every concrete operator family, with random parameters.
fn operator() -> impl Strategy<Value = MonotoneOperator> {
    prop_oneof![
        (vector(DIM), 0.1f64..5.0).prop_map(|(c, r)| MonotoneOperator::ball_normal_cone(c, r).unwrap()),
        vector(DIM).prop_map(MonotoneOperator::quadratic),
        (0.05f64..3.0).prop_map(|w| MonotoneOperator::l1(w, DIM).unwrap()),
        (vector(DIM), vector(DIM)).prop_map(|(b, o)| {
            let b = if b.norm() < 1e-3 {
                Vector::new(vec![1.0, 0.0, 0.0]).unwrap()
            } else {
                b
            };
            MonotoneOperator::affine_normal_cone(&[b], o).unwrap()
        }),
        Just(MonotoneOperator::zero(DIM).unwrap()),
    ]
}

fn cone() -> impl Strategy<Value = MonotoneOperator> {
    prop_oneof![
        (vector(DIM), 0.1f64..5.0).prop_map(|(c, r)| MonotoneOperator::ball_normal_cone(c, r).unwrap()),
        (vector(DIM), vector(DIM), vector(DIM)).prop_map(|(b1, b2, o)| {
            MonotoneOperator::affine_normal_cone(&[b1, b2], o.clone())
                .unwrap_or_else(|_| MonotoneOperator::affine_normal_cone(&[], o).unwrap())
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 512,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn resolvents_are_firmly_nonexpansive(
        op in operator(),
        gamma in 0.01f64..20.0,
        x in vector(DIM),
        y in vector(DIM),
    ) {
        let jx = op.resolvent(gamma, &x).unwrap();
        let jy = op.resolvent(gamma, &y).unwrap();
        let lhs = jx.distance(&jy).unwrap().powi(2)
            + (&x - &jx).distance(&(&y - &jy)).unwrap().powi(2);
        let rhs = x.distance(&y).unwrap().powi(2);
        prop_assert!(lhs <= rhs + 1e-10, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn resolvent_is_deterministic(op in operator(), gamma in 0.01f64..20.0, x in vector(DIM)) {
        prop_assert_eq!(op.resolvent(gamma, &x).unwrap(), op.resolvent(gamma, &x).unwrap());
    }

    #[test]
    fn modified_reflection_is_convex_combination(
        op in operator(),
        beta in 0.01f64..1.0,
        gamma in 0.01f64..20.0,
        x in vector(DIM),
    ) {
        let lhs = reflected_step(&op, beta, gamma, &x).unwrap();
        let r = reflected_step(&op, 1.0, gamma, &x).unwrap();
        let rhs = x.lincomb(-(1.0 - beta), &r, beta).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn strengthening_scales_the_resolvent(
        op in operator(),
        beta in 0.01f64..0.99,
        gamma in 0.01f64..20.0,
        x in vector(DIM),
    ) {
        let base = op.scaled(gamma).unwrap();
        let strong = base.strengthened(beta).unwrap();
        prop_assert_eq!(strong.apply(&x).unwrap(), base.apply(&x).unwrap().scale(beta));
    }

    #[test]
    fn perturbation_shifts_the_resolvent(
        op in operator(),
        w in vector(DIM),
        gamma in 0.01f64..20.0,
        x in vector(DIM),
    ) {
        let shifted = op.perturbed(w.clone()).unwrap();
        let expected = &op.resolvent(gamma, &(&x - &w)).unwrap() + &w;
        prop_assert_eq!(shifted.resolvent(gamma, &x).unwrap(), expected);
    }

    #[test]
    fn cone_resolvents_ignore_gamma(op in cone(), x in vector(DIM)) {
        let base = op.resolvent(1.0, &x).unwrap();
        prop_assert_eq!(op.resolvent(0.1, &x).unwrap(), base.clone());
        prop_assert_eq!(op.resolvent(10.0, &x).unwrap(), base);
    }

    #[test]
    fn scaling_composes(op in operator(), a in 0.1f64..4.0, b in 0.1f64..4.0, x in vector(DIM)) {
        let nested = op.scaled(a).unwrap().scaled(b).unwrap();
        let direct = op.scaled(a * b).unwrap();
        prop_assert_eq!(nested.apply(&x).unwrap(), direct.apply(&x).unwrap());
    }
}
