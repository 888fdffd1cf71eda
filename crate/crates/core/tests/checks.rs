use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use qhkit::checks::{
    check_cqh, check_semisolid, check_solid, estimate_qh_constant, estimate_qs_eta, estimate_relative_theta,
    sample_local_pairs, sample_pairs, sample_triples, theorem_d_fit, triple_ratio, uniformity_check, CheckConfig,
    EmpiricalGauge, Triple,
};
use qhkit::geom::rotation2;
use qhkit::maps::{identity, radial_stretch, similarity, zigzag_straightener};
use qhkit::{Domain, Point};

fn disk() -> Domain {
    Domain::ball(Point::new2(0.0, 0.0), 1.0).unwrap()
}

fn cfg(level: u32) -> CheckConfig {
    CheckConfig { level, seed: 3, tol: 1e-6 }
}

fn rotated_triple() -> qhkit::MapUnderTest {
    similarity(3.0, rotation2(FRAC_PI_2), Point::new2(1.0, -2.0), &disk()).unwrap()
}

#[test]
fn radial_pair_matches_closed_form_distortion() {
    // on a radius both k-distances are explicit: -log(1 - r) and -log(1 - r^a)
    let f = radial_stretch(2.0, &disk()).unwrap();
    let r: f64 = 0.6;
    let (k, kp) = (-(1.0 - r).ln(), -(1.0 - r * r).ln());
    let expected = (k / kp).max(kp / k);
    let pairs = [(Point::origin(2), Point::new2(r, 0.0))];
    let (m, rep) = estimate_qh_constant(&f, &pairs, &cfg(5)).unwrap();
    assert!((m - expected).abs() < 1e-4, "{m} vs {expected}");
    assert!(rep.constant("m_qh_certified_lower").unwrap() <= m * (1.0 + 1e-12));
    assert_eq!(rep.witness("m_qh").unwrap().points.len(), 4);
}

#[test]
fn similarity_is_an_isometry_for_k() {
    let f = rotated_triple();
    let pairs = sample_pairs(&f.source, 40, 1).unwrap();
    let (m, rep) = estimate_qh_constant(&f, &pairs, &cfg(3)).unwrap();
    assert!((m - 1.0).abs() < 1e-6);
    assert!(rep.passed());
    let cqh = check_cqh(&f, &pairs, 1.0, 0.0, &cfg(3)).unwrap();
    assert!(cqh.passed(), "{:?}", cqh.constants);
    let solid = check_solid(&f, &pairs, &|t| t, &cfg(3)).unwrap();
    assert!(solid.passed());
}

#[test]
fn similarity_gauges_are_the_identity() {
    // d'(f(x)) = 3 d(x) and all distances scale by 3
    let f = rotated_triple();
    let pairs = sample_local_pairs(&f.source, 100, 0.5, 2).unwrap();
    let theta = estimate_relative_theta(&f, &pairs, 0.5).unwrap();
    for &(t, v) in theta.samples() {
        assert!((v - t).abs() < 1e-12 * t.max(1.0));
    }
    let c = Point::new2(0.1, 0.2);
    let triples = sample_triples(&f.source, &c, 0.5, 100, 5).unwrap();
    let eta = estimate_qs_eta(&f, &c, 0.5, &triples).unwrap();
    for &(t, v) in eta.samples() {
        assert!((v - t).abs() < 1e-12 * t.max(1.0));
    }
    assert!(eta.populated_bins() > 1);
}

#[test]
fn relative_theta_rejects_far_pairs() {
    let f = identity(&disk());
    let pairs = [(Point::new2(0.0, 0.0), Point::new2(0.6, 0.0))];
    assert!(estimate_relative_theta(&f, &pairs, 0.5).is_err());
}

#[test]
fn straightener_is_not_semisolid_with_identity_gauge() {
    let f = zigzag_straightener(4, 0.05, FRAC_PI_2).unwrap();
    let pairs = sample_pairs(&f.source, 200, 7).unwrap();
    let rep = check_semisolid(&f, &pairs, &|t| t, &cfg(2)).unwrap();
    assert!(!rep.passed());
    assert!(rep.constant("forward_max_excess").unwrap() > 0.0);
    // a generous affine gauge absorbs the distortion
    let loose = check_semisolid(&f, &pairs, &|t| 4.0 * t + 2.0, &cfg(2)).unwrap();
    assert!(loose.passed());
}

#[test]
fn cqh_input_validation() {
    let f = identity(&disk());
    let pairs = sample_pairs(&f.source, 4, 0).unwrap();
    assert!(check_cqh(&f, &pairs, 0.5, 0.0, &cfg(2)).is_err());
    assert!(check_cqh(&f, &pairs, 1.0, -1.0, &cfg(2)).is_err());
}

#[test]
fn ball_is_uniform_and_slit_disk_is_not_like_it() {
    let ball = disk();
    let pairs = sample_pairs(&ball, 30, 11).unwrap();
    let (c, rep) = uniformity_check(&ball, &pairs, &cfg(3)).unwrap();
    assert!((1.0..3.0).contains(&c), "{c}");
    assert!(rep.passed());
    let fit = theorem_d_fit(&ball, &pairs, &cfg(3)).unwrap();
    assert!(fit.c_prime >= 1.0 && fit.c_prime < 2.5);
    // the fitted line stays above every sample
    let slit = Domain::slit_disk();
    let straddle = qhkit::experiments::slit_straddling_pairs(0.02);
    let sfit = theorem_d_fit(&slit, &straddle, &cfg(3)).unwrap();
    assert!(sfit.c_prime > 2.0 * fit.c_prime);
}

#[test]
fn gauge_handles_a_known_sample_set() {
    let g = EmpiricalGauge::from_samples("g", vec![(0.1, 1.0), (0.2, 0.5), (0.4, 2.0)]).unwrap();
    assert_eq!(g.eval(0.15), Some(1.0));
    assert_eq!(g.eval(0.3), Some(1.0));
    assert_eq!(g.eval(0.5), Some(2.0));
    assert_eq!(g.eval(0.05), None);
    assert!(EmpiricalGauge::from_samples("g", vec![]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gauge_envelope_is_monotone(samples in prop::collection::vec((1e-3f64..10.0, 0.0f64..5.0), 1..60)) {
        let g = EmpiricalGauge::from_samples("p", samples.clone()).unwrap();
        let env: Vec<f64> = g.monotone_envelope.iter().flatten().copied().collect();
        for w in env.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        for (t, v) in samples {
            prop_assert!(g.eval(t).unwrap() >= v);
        }
    }

    #[test]
    fn triple_ratio_reciprocal(
        x in prop::array::uniform2(-1.0f64..1.0),
        a in prop::array::uniform2(-1.0f64..1.0),
        b in prop::array::uniform2(-1.0f64..1.0),
    ) {
        let (x, a, b) = (Point::new2(x[0], x[1]), Point::new2(a[0], a[1]), Point::new2(b[0], b[1]));
        prop_assume!(x.dist(&a) > 1e-6 && x.dist(&b) > 1e-6 && a.dist(&b) > 1e-6);
        let t = Triple::new(x, a, b).unwrap();
        let s = Triple::new(x, b, a).unwrap();
        prop_assert!((triple_ratio(&t) * triple_ratio(&s) - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn qh_constant_is_symmetric_under_inversion(seed in 0u64..1000, a in 1.2f64..3.0) {
        let f = radial_stretch(a, &disk()).unwrap();
        let pairs = sample_pairs(&f.source, 12, seed).unwrap();
        let images: Vec<_> = pairs.iter().map(|(x, y)| (f.forward(x), f.forward(y))).collect();
        let (m, _) = estimate_qh_constant(&f, &pairs, &cfg(3)).unwrap();
        let (mi, _) = estimate_qh_constant(&f.inverted(), &images, &cfg(3)).unwrap();
        prop_assert!(m >= 1.0);
        prop_assert!((m - mi).abs() < 1e-9 * m, "{} vs {}", m, mi);
    }

    #[test]
    fn cqh_verdict_is_monotone_in_constants(seed in 0u64..1000, m in 1.0f64..3.0, c in 0.0f64..1.0) {
        let f = radial_stretch(2.0, &disk()).unwrap();
        let pairs = sample_pairs(&f.source, 10, seed).unwrap();
        let base = check_cqh(&f, &pairs, m, c, &cfg(3)).unwrap();
        let bigger = check_cqh(&f, &pairs, m * 1.5, c + 0.5, &cfg(3)).unwrap();
        prop_assert!(!base.passed() || bigger.passed());
        prop_assert!(bigger.constant("c_cqh").unwrap() <= base.constant("c_cqh").unwrap() + 1e-12);
    }
}
