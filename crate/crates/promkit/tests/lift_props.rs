//! Property tests for the observable lifts: inversion on the image of the
//! lift, and the polynomial recurrence against explicit closed forms.

use promkit::data::ObservableLift;
use proptest::prelude::*;

fn finite_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e6f64..1e6, len)
}

proptest! {
    #[test]
    fn identity_round_trip(q in finite_vec(5)) {
        let lift = ObservableLift::Identity { dim: 5 };
        let y = lift.lift(&q).unwrap();
        let ys: Vec<f64> = (0..y.nrows()).map(|i| y[i]).collect();
        let back = lift.unlift(&ys).unwrap();
        for (i, v) in q.iter().enumerate() {
            prop_assert_eq!(back[i], *v);
        }
    }

    #[test]
    fn affine_round_trip(q in finite_vec(4)) {
        let lift = ObservableLift::AffineAugment { qoi_dim: 4 };
        let y = lift.lift(&q).unwrap();
        prop_assert_eq!(y[0], 1.0);
        let ys: Vec<f64> = (0..y.nrows()).map(|i| y[i]).collect();
        prop_assert_eq!(lift.leading_drift(&ys), 0.0);
        let back = lift.unlift(&ys).unwrap();
        for (i, v) in q.iter().enumerate() {
            prop_assert_eq!(back[i], *v);
        }
    }

    #[test]
    fn component_stack_round_trip(q in finite_vec(6)) {
        let lift = ObservableLift::ComponentStack { parts: vec![2, 3, 1] };
        let y = lift.lift(&q).unwrap();
        prop_assert_eq!(y.nrows(), 7);
        let ys: Vec<f64> = (0..y.nrows()).map(|i| y[i]).collect();
        let back = lift.unlift(&ys).unwrap();
        for (i, v) in q.iter().enumerate() {
            prop_assert_eq!(back[i], *v);
        }
    }

    #[test]
    fn hermite_round_trip(
        q in -1e3f64..1e3,
        mean in -10.0f64..10.0,
        scale in 0.1f64..10.0,
        order in 2usize..8,
    ) {
        let lift = ObservableLift::Hermite { order, mean, scale };
        let y = lift.lift(&[q]).unwrap();
        let ys: Vec<f64> = (0..y.nrows()).map(|i| y[i]).collect();
        let back = lift.unlift(&ys).unwrap();
        // inversion reads the degree-one slot: exact up to the two
        // rounding steps of the normalization
        prop_assert!((back[0] - q).abs() <= 1e-9 * q.abs().max(scale));
    }

    #[test]
    fn hermite_matches_closed_forms(x in -5.0f64..5.0) {
        // probabilists' polynomials up to degree 4
        let lift = ObservableLift::Hermite { order: 5, mean: 0.0, scale: 1.0 };
        let y = lift.lift(&[x]).unwrap();
        let explicit = [
            1.0,
            x,
            x * x - 1.0,
            x * x * x - 3.0 * x,
            x * x * x * x - 6.0 * x * x + 3.0,
        ];
        for (i, want) in explicit.iter().enumerate() {
            prop_assert!((y[i] - want).abs() <= 1e-9 * want.abs().max(1.0), "degree {}", i);
        }
    }

    #[test]
    fn observable_dims_are_consistent(parts in prop::collection::vec(1usize..5, 1..4)) {
        let lift = ObservableLift::ComponentStack { parts: parts.clone() };
        let nq: usize = parts.iter().sum();
        prop_assert_eq!(lift.qoi_dim(), nq);
        prop_assert_eq!(lift.observable_dim(), nq + 1);
        let q = vec![0.5; nq];
        let y = lift.lift(&q).unwrap();
        prop_assert_eq!(y.nrows(), lift.observable_dim());
    }
}
