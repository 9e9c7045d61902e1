use msl::convex_geometry::{ConvexBody, Exponent, UnitVector};
use msl::nodal_density::{HyperplaneFamily, PrunedArrangement};
use msl::sampling_experiments::{make_test_function, nested_families, sampling_ratio};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ratio_ignores_amplitude(c in prop_oneof![-1e6f64..-1e-6, 1e-6f64..1e6], seed in 0u64..500, p in 1.0f64..6.0) {
        let ball = ConvexBody::ball(2, 1.0).unwrap();
        let f = &make_test_function(&ball, 0.3, &[vec![0.4, -0.1]]).unwrap()[1];
        let g = PrunedArrangement::raw(2, nested_families(2, &[0.8, 1.9], seed).unwrap()).unwrap();
        let a = sampling_ratio(f, &g, Exponent(p), 12.0, 0.2).unwrap();
        let b = sampling_ratio(&f.scaled(c), &g, Exponent(p), 12.0, 0.2).unwrap();
        prop_assert_eq!(a.ratio.to_bits(), b.ratio.to_bits());
    }

    #[test]
    fn trajectory_norm_grows_with_inclusion(seed in 0u64..500, p in prop_oneof![Just(f64::INFINITY), 1.0f64..4.0]) {
        let f = &make_test_function(&ConvexBody::lp_ball_2d(3.0).unwrap(), 0.2, &[]).unwrap()[0];
        let fams = nested_families(2, &[0.4, 1.0, 2.2, 3.0], seed).unwrap();
        let mut prev = 0.0;
        for k in 1..=fams.len() {
            let g = PrunedArrangement::raw(2, fams[..k].to_vec()).unwrap();
            let r = sampling_ratio(f, &g, Exponent(p), 14.0, 0.15).unwrap();
            prop_assert!(r.trajectory_norm >= prev);
            prev = r.trajectory_norm;
        }
    }
}

#[test]
fn default_bank_is_grid_converged() {
    for body in [ConvexBody::ball(2, 1.0).unwrap(), ConvexBody::cube(2, 1.0).unwrap()] {
        let bank = make_test_function(&body, 0.3, &[vec![0.3, 0.2], vec![0.5, 0.5]]).unwrap();
        let nu = UnitVector::new(vec![0.8, 0.6]).unwrap();
        let g = PrunedArrangement::raw(2, vec![HyperplaneFamily::new(nu, 0.9, 0.1).unwrap()]).unwrap();
        for f in &bank {
            let h = 1.0 / (8.0 * f.max_frequency());
            let half = 40.0 / f.bandwidths()[0];
            let a = sampling_ratio(f, &g, Exponent(2.0), half, h).unwrap();
            let b = sampling_ratio(f, &g, Exponent(2.0), half, h / 2.0).unwrap();
            assert!((a.ambient_norm / b.ambient_norm - 1.0).abs() < 0.01);
            assert!((a.trajectory_norm / b.trajectory_norm - 1.0).abs() < 0.01);
            assert!(a.tail_bound < 1e-3);
        }
    }
}

#[test]
fn single_dense_family_beats_sparse_one() {
    let f = &make_test_function(&ConvexBody::ball(2, 1.0).unwrap(), 0.3, &[]).unwrap()[0];
    let nu = UnitVector::new(vec![1.0, 0.0]).unwrap();
    let at = |s: f64| PrunedArrangement::raw(2, vec![HyperplaneFamily::new(nu.clone(), s, 0.1).unwrap()]).unwrap();
    let sparse = sampling_ratio(f, &at(4.0), Exponent(2.0), 40.0, 0.2).unwrap();
    let dense = sampling_ratio(f, &at(0.5), Exponent(2.0), 40.0, 0.2).unwrap();
    assert!(sparse.ratio > dense.ratio);
}
