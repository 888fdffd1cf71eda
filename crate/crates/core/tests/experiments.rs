use std::f64::consts::FRAC_PI_2;

use qhkit::experiments::{run_example1, run_example2, run_lemma1, run_named, LEMMA1_TOL};

#[test]
fn example1_rows_follow_the_closed_forms() {
    let res = run_example1(&[0.1, 0.05], 3).unwrap();
    assert!(res.passed(), "{:?}", res.verdicts);
    let t = res.column("t").unwrap();
    let j = res.column("j").unwrap();
    let k = res.column("k_upper").unwrap();
    for i in 0..t.len() {
        // |x - y| = 2t and d = t on both points
        assert!((j[i] - 3f64.ln()).abs() < 1e-12);
        assert!(k[i] >= (1.0 + 1.0 / t[i]).ln());
    }
    assert!(run_example1(&[0.5], 3).is_err());
}

#[test]
fn example2_straight_tube_j_is_explicit() {
    let r = 0.05;
    let res = run_example2(&[2, 5], r, FRAC_PI_2).unwrap();
    let jd = res.column("j_d").unwrap();
    for (m, v) in [2.0, 5.0].iter().zip(jd) {
        // axis points (m - 1) segment lengths apart, both at depth r
        let expected = (1.0 + 2f64.sqrt() * (m - 1.0) / r).ln();
        assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
    }
    assert!(res.verdicts["j_d_prime_bounded"]);
}

#[test]
fn lemma1_segment_length_has_a_closed_form() {
    // along [x, y] from the center of B(x, d): length is -log(1 - |x - y|/d)
    let res = run_lemma1(30, &[0.5], 1).unwrap();
    assert_eq!(res.column("violations").unwrap(), vec![0.0]);
    let over = res.column("max_length_over_bound").unwrap()[0];
    let s: f64 = 0.5;
    // worst case is |x - y| = s d: -log(1 - s) (1 - s) / log(1 + s)
    let worst = -(1.0 - s).ln() * (1.0 - s) / s.ln_1p();
    assert!(over <= worst + LEMMA1_TOL, "{over} > {worst}");
    assert!(run_lemma1(0, &[0.5], 1).is_err());
}

#[test]
fn unknown_experiment_is_an_error() {
    assert!(run_named("nope", 3, 0).is_err());
}
