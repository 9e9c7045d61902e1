use std::f64::consts::PI;

use msl::convex_geometry::{boundary_point, gauge, mean_width, support_function, ConvexBody, SphereQuadrature, UnitVector};
use proptest::prelude::*;

fn bodies() -> Vec<ConvexBody> {
    let mut v = vec![
        ConvexBody::ball(2, 1.3).unwrap(),
        ConvexBody::ball(3, 0.5).unwrap(),
        ConvexBody::ball(4, 2.0).unwrap(),
        ConvexBody::cube(2, 1.0).unwrap(),
        ConvexBody::cube(3, 0.4).unwrap(),
    ];
    for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        v.push(ConvexBody::lp_ball_2d(p).unwrap());
    }
    v
}

fn direction(d: usize) -> impl Strategy<Value = UnitVector> {
    prop::collection::vec(-1.0f64..1.0, d)
        .prop_filter("not too short", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            UnitVector::new(v.into_iter().map(|x| x / n).collect()).unwrap()
        })
}

fn negate(u: &UnitVector) -> UnitVector {
    UnitVector::new(u.as_slice().iter().map(|x| -x).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn support_is_even(t2 in direction(2), t3 in direction(3), t4 in direction(4)) {
        for b in bodies() {
            let t = match b.dimension() { 2 => &t2, 3 => &t3, _ => &t4 };
            let (a, c) = (support_function(&b, t).unwrap(), support_function(&b, &negate(t)).unwrap());
            prop_assert!((a - c).abs() <= 1e-12, "{}: {a} vs {c}", b.describe());
        }
    }

    #[test]
    fn boundary_points_have_unit_gauge(t2 in direction(2), t3 in direction(3), t4 in direction(4)) {
        for b in bodies().into_iter().filter(|b| b.is_strictly_convex()) {
            let t = match b.dimension() { 2 => &t2, 3 => &t3, _ => &t4 };
            let x = boundary_point(&b, t).unwrap();
            let g = gauge(&b, &x).unwrap();
            prop_assert!((g - 1.0).abs() <= 1e-6, "{}: gauge {g}", b.describe());
        }
    }

    #[test]
    fn support_bounds_boundary_points(t in direction(2), s in direction(2), p in 1.1f64..9.0) {
        let b = ConvexBody::lp_ball_2d(p).unwrap();
        let x = boundary_point(&b, &t).unwrap();
        let h = support_function(&b, &s).unwrap();
        let dot: f64 = x.iter().zip(s.as_slice()).map(|(a, c)| a * c).sum();
        prop_assert!(dot <= h + 1e-9);
    }
}

#[test]
fn ball_widths_are_diameters() {
    for d in 2..=4 {
        let quad = SphereQuadrature::for_dimension(d, 21).unwrap();
        for r in [0.5, 1.0, 3.0] {
            let w = mean_width(&ConvexBody::ball(d, r).unwrap(), &quad).unwrap();
            assert!(w.agrees_with(2.0 * r, 3.0) || (w.value - 2.0 * r).abs() < 1e-6, "d={d} R={r}: {w:?}");
        }
    }
}

#[test]
fn width_is_monotone_under_inclusion() {
    let quad = SphereQuadrature::for_dimension(2, 0).unwrap();
    let w = |b: &ConvexBody| mean_width(b, &quad).unwrap().value;
    // lp balls grow with p, and B_1 ⊆ cube ⊆ B_{sqrt 2}
    let chain: Vec<ConvexBody> = [1.0, 1.2, 2.0, 5.0, f64::INFINITY].iter().map(|&p| ConvexBody::lp_ball_2d(p).unwrap()).collect();
    let grid: Vec<Vec<f64>> = (0..64).map(|k| { let a = 2.0 * PI * k as f64 / 64.0; vec![a.cos(), a.sin()] }).collect();
    for pair in chain.windows(2) {
        // inclusion by gauge domination
        for x in &grid {
            assert!(gauge(&pair[1], x).unwrap() <= gauge(&pair[0], x).unwrap() + 1e-12);
        }
        assert!(w(&pair[0]) <= w(&pair[1]) + 1e-9);
    }
    let inner = ConvexBody::ball(2, 1.0).unwrap();
    let cube = ConvexBody::cube(2, 1.0).unwrap();
    let outer = ConvexBody::ball(2, 2f64.sqrt()).unwrap();
    assert!(w(&inner) <= w(&cube) && w(&cube) <= w(&outer));
    // cube of half-width 1: W = 8 / pi in the plane
    assert!((w(&cube) - 8.0 / PI).abs() < 1e-5);
}

#[test]
fn oracle_body_matches_closed_form() {
    let quad = SphereQuadrature::for_dimension(3, 0).unwrap();
    let oracle = ConvexBody::oracle(3, |t: &[f64]| 0.7 * t.iter().map(|x| x * x).sum::<f64>().sqrt(), true, false).unwrap();
    let w = mean_width(&oracle, &quad).unwrap();
    assert!((w.value - 1.4).abs() < 1e-4);
}
