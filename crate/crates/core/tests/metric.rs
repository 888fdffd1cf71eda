use proptest::prelude::*;
use qhkit::metric::{j_metric, k_lower, k_upper, qh_length, refine_k};
use qhkit::{Domain, Estimator, Path, Point};

fn unit_disk() -> Domain {
    Domain::ball(Point::new2(0.0, 0.0), 1.0).unwrap()
}

/// Hyperbolic distance in the upper half-plane, where the quasihyperbolic
/// density `1 / y` is the hyperbolic one.
fn half_plane_distance(x: &Point, y: &Point) -> f64 {
    let (dx, dy) = (x.get(0) - y.get(0), x.get(1) - y.get(1));
    (1.0 + (dx * dx + dy * dy) / (2.0 * x.get(1) * y.get(1))).acosh()
}

#[test]
fn radial_k_in_the_disk_matches_closed_form() {
    // along a radius the geodesic is the segment: k(0, r) = -log(1 - r)
    let d = unit_disk();
    for r in [0.3, 0.6, 0.9] {
        let x = Point::origin(2);
        let y = Point::new2(r, 0.0);
        let exact = -(1.0 - r).ln();
        let up = k_upper(&d, &x, &y, 5).unwrap();
        assert!(up.value >= exact - 1e-9, "r = {r}: {} < {exact}", up.value);
        assert!(up.value - exact < 1e-6 + up.abs_tol, "r = {r}: {} vs {exact}", up.value);
        let seg = Path::new(&d, vec![x, y]).unwrap();
        let len = qh_length(&seg, &d, 1e-10).unwrap();
        assert!((len.value - exact).abs() < 1e-9);
    }
}

#[test]
fn half_plane_upper_bound_tracks_hyperbolic_distance() {
    let h = Domain::half_plane(2).unwrap();
    let cases = [
        (Point::new2(0.0, 1.0), Point::new2(0.0, 4.0)),
        (Point::new2(-0.5, 0.5), Point::new2(0.5, 0.5)),
        (Point::new2(0.0, 0.2), Point::new2(1.0, 0.6)),
    ];
    for (x, y) in cases {
        let exact = half_plane_distance(&x, &y);
        let up = k_upper(&h, &x, &y, 5).unwrap();
        assert!(up.value >= exact - 1e-9);
        assert!(up.value <= exact * 1.02, "{x} {y}: {} vs {exact}", up.value);
        let lo = k_lower(&h, &x, &y).unwrap();
        assert!(lo.value <= exact + 1e-12);
    }
}

#[test]
fn j_follows_its_definition() {
    let d = unit_disk();
    let (x, y) = (Point::new2(0.0, 0.0), Point::new2(0.5, 0.0));
    // min(d(x), d(y)) = 0.5 so j = log(1 + 0.5 / 0.5)
    assert!((j_metric(&d, &x, &y).unwrap() - 2f64.ln()).abs() < 1e-15);
    let slit = Domain::slit_disk();
    let (a, b) = (Point::new2(0.5, 0.1), Point::new2(0.5, -0.1));
    assert!((j_metric(&slit, &a, &b).unwrap() - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn refinement_never_increases_k() {
    let d = Domain::punctured_ball(Point::new2(0.0, 0.0), 1.0, Point::new2(0.0, 0.0)).unwrap();
    let (x, y) = (Point::new2(-0.4, 0.01), Point::new2(0.4, -0.02));
    let seq = refine_k(&d, &x, &y, 2, 4).unwrap();
    let vals: Vec<f64> = seq.iter().filter_map(|(_, e)| e.map(|e| e.value)).collect();
    assert!(vals.len() >= 2);
    for w in vals.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{vals:?}");
    }
}

#[test]
fn neargeodesic_avoids_the_slit_and_is_near_optimal() {
    let slit = Domain::slit_disk();
    let (x, y) = (Point::new2(0.5, 0.1), Point::new2(0.5, -0.1));
    let est = Estimator::shared();
    let path = est.extract_neargeodesic(&slit, &x, &y, 4).unwrap();
    assert_eq!(path.start(), x);
    assert_eq!(path.end(), y);
    for w in path.points().windows(2) {
        assert!(slit.segment_inside(&w[0], &w[1]));
    }
    // it has to go around the origin
    assert!(path.points().iter().any(|p| p.get(0) < 0.0));
    let c = est.neargeodesic_constant(&path, &slit, 100, 4).unwrap();
    assert!((1.0..1.1).contains(&c), "constant {c}");
}

#[test]
fn three_dimensional_ball_radial_k() {
    let b = Domain::ball(Point::new3(0.0, 0.0, 0.0), 2.0).unwrap();
    let (x, y) = (Point::new3(0.0, 0.0, 0.0), Point::new3(0.0, 1.0, 0.0));
    let up = k_upper(&b, &x, &y, 3).unwrap();
    assert!((up.value - 2f64.ln()).abs() < 1e-6 + up.abs_tol);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn j_is_below_k_and_both_are_symmetric(
        ax in -0.8f64..0.8, ay in -0.5f64..0.5,
        bx in -0.8f64..0.8, by in -0.5f64..0.5,
    ) {
        let d = unit_disk();
        let (x, y) = (Point::new2(ax, ay), Point::new2(bx, by));
        prop_assume!(x.dist(&y) > 1e-6);
        let j = j_metric(&d, &x, &y).unwrap();
        prop_assert_eq!(j, j_metric(&d, &y, &x).unwrap());
        let lo = k_lower(&d, &x, &y).unwrap();
        let up = k_upper(&d, &x, &y, 3).unwrap();
        let back = k_upper(&d, &y, &x, 3).unwrap();
        prop_assert!(j <= lo.value + 1e-15);
        prop_assert!(lo.value <= up.value + up.abs_tol);
        prop_assert!((up.value - back.value).abs() <= 1e-12);
    }

    #[test]
    fn segment_length_dominates_log_ratio(
        ax in -0.6f64..0.6, ay in -0.6f64..0.6, t in 0.0f64..1.0, ang in 0.0f64..6.28,
    ) {
        // along any path k-length is at least |log d(y) - log d(x)|
        let d = unit_disk();
        let x = Point::new2(ax, ay);
        prop_assume!(x.norm() < 0.85);
        let dx = d.dist_to_boundary(&x).unwrap();
        let y = x + Point::new2(ang.cos(), ang.sin()) * (0.9 * t * dx);
        prop_assume!(x.dist(&y) > 1e-9);
        let seg = Path::new(&d, vec![x, y]).unwrap();
        let len = qh_length(&seg, &d, 1e-10).unwrap().value;
        let dy = d.dist_to_boundary(&y).unwrap();
        prop_assert!(len >= (dy / dx).ln().abs() - 1e-9);
        prop_assert!(len >= j_metric(&d, &x, &y).unwrap() - 1e-9);
    }
}

#[test]
fn radial_chain_halves_the_distance_to_the_boundary() {
    // with λ = 1/2 along a radius: 1 - z_{i+1} = (1 - z_i) / 2
    let d = unit_disk();
    let path = Path::new(&d, vec![Point::origin(2), Point::new2(0.9, 0.0)]).unwrap();
    let chain = qhkit::metric::chain_decompose(&d, &path, 0.5).unwrap();
    let expected = [0.0, 0.5, 0.75, 0.875];
    assert_eq!(chain.len(), expected.len());
    for (z, e) in chain.iter().zip(expected) {
        assert!((z.get(0) - e).abs() < 1e-14 && z.get(1) == 0.0);
    }
}
