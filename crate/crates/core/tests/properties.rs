use proptest::prelude::*;

use jeft::geometry::{geodesic_distance, horocycle_bracket, translate, translate_boundary, BoundaryPoint, Point, SpectralParam};
use jeft::specfun::{h3_closed_form_real, plancherel_density, SphericalEvaluator};
use jeft::Model;

fn direction(dim: usize, theta: f64, u: f64) -> BoundaryPoint {
    if dim == 2 {
        BoundaryPoint::from_angle(theta)
    } else {
        BoundaryPoint::from_polar(u, theta)
    }
}

fn point(dim: usize, r: f64, theta: f64, u: f64) -> Point {
    Point::at_distance(&direction(dim, theta, u), r).unwrap()
}

fn arb_point(dim: usize) -> impl Strategy<Value = Point> {
    (0.0..3.0f64, 0.0..std::f64::consts::TAU, -1.0..1.0f64).prop_map(move |(r, t, u)| point(dim, r, t, u))
}

fn arb_direction(dim: usize) -> impl Strategy<Value = BoundaryPoint> {
    (0.0..std::f64::consts::TAU, -1.0..1.0f64).prop_map(move |(t, u)| direction(dim, t, u))
}

fn arb_dim() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(3usize)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn translation_is_an_isometry((a, x, y) in arb_dim().prop_flat_map(|d| (arb_point(d), arb_point(d), arb_point(d)))) {
        let d0 = geodesic_distance(&x, &y).unwrap();
        let d1 = geodesic_distance(&translate(&a, &x).unwrap(), &translate(&a, &y).unwrap()).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
    }

    #[test]
    fn translation_moves_origin_to_a((a, dim) in arb_dim().prop_flat_map(|d| (arb_point(d), Just(d)))) {
        let moved = translate(&a, &Point::origin(dim)).unwrap();
        prop_assert!(geodesic_distance(&moved, &a).unwrap() < 1e-9);
    }

    #[test]
    fn bracket_is_bounded_by_distance((x, b) in arb_dim().prop_flat_map(|d| (arb_point(d), arb_direction(d)))) {
        let r = x.radius();
        let br = horocycle_bracket(&x, &b).unwrap();
        prop_assert!(br.abs() <= r * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn bracket_cocycle((a, x, b) in arb_dim().prop_flat_map(|d| (arb_point(d), arb_point(d), arb_direction(d)))) {
        let gb = translate_boundary(&a, &b).unwrap();
        let lhs = horocycle_bracket(&translate(&a, &x).unwrap(), &gb).unwrap();
        let rhs = horocycle_bracket(&x, &b).unwrap() + horocycle_bracket(&a, &gb).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()));
    }

    #[test]
    fn spherical_function_is_even_and_bounded(l in 0.0..20.0f64, r in 0.0..6.0f64, h2 in any::<bool>()) {
        let model = if h2 { Model::H2 } else { Model::H3 };
        let ev = SphericalEvaluator::with_defaults(model);
        let p = ev.eval(SpectralParam::real(l), r).unwrap();
        let m = ev.eval(SpectralParam::real(-l), r).unwrap();
        let zero = ev.eval(SpectralParam::real(0.0), r).unwrap();
        prop_assert!((p - m).norm() <= 1e-12);
        prop_assert!(p.im.abs() <= 1e-12);
        prop_assert!(p.re.abs() <= zero.re + 1e-12);
        if !h2 {
            prop_assert!((p.re - h3_closed_form_real(l, r)).abs() <= 1e-13);
        }
    }

    #[test]
    fn density_is_positive_and_increasing(l in 0.0..50.0f64, dl in 1e-3..1.0f64) {
        for model in [Model::H2, Model::H3] {
            let a = plancherel_density(l, model).unwrap();
            let b = plancherel_density(l + dl, model).unwrap();
            prop_assert!(a >= 0.0 && b > a);
        }
    }
}

#[test]
fn inputs_outside_the_ball_are_rejected() {
    assert!(Point::new(&[1.0, 0.0]).is_err());
    assert!(Point::new(&[0.6, 0.6, 0.6]).is_err());
    assert!(BoundaryPoint::new(&[0.5, 0.5]).is_err());
    assert!(plancherel_density(-1.0, Model::H2).is_err());
    assert!(plancherel_density(f64::NAN, Model::H3).is_err());
}
