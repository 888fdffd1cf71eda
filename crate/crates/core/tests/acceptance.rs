//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::Instant;

use qhkit::checks::{estimate_qh_constant, local_to_global_qh, sample_local_pairs, sample_pairs, CheckConfig};
use qhkit::experiments::{run_example1, run_example2, run_lemma1, run_uniformity, LEMMA1_TOL};
use qhkit::geom::{rotation2, segment_distance};
use qhkit::maps::{radial_stretch, similarity, zigzag_straightener};
use qhkit::metric::{chain_decompose, k_lower, Estimator};
use qhkit::{Domain, MapUnderTest, Point, Result};

type Outcome = Result<(bool, String)>;

fn disk() -> Domain {
    Domain::ball(Point::new2(0.0, 0.0), 1.0).unwrap()
}

/// j of ((1/2, t), (1/2, -t)) in the slit disk is log 3 within 1e-12.
fn criterion1() -> Outcome {
    let res = run_example1(&[0.1, 0.05, 0.02], 4)?;
    let j = res.column("j").unwrap();
    let err = j.iter().map(|v| (v - 3f64.ln()).abs()).fold(0.0, f64::max);
    Ok((err <= 1e-12, format!("max |j - log 3| = {err:.3e} (tol 1e-12)")))
}

/// k_upper >= log(1 + 1/t) at level 4; k/j strictly increasing as t
/// decreases and above 3 at t = 0.02.
fn criterion2() -> Outcome {
    let res = run_example1(&[0.1, 0.05, 0.02], 4)?;
    let t = res.column("t").unwrap();
    let k = res.column("k_upper").unwrap();
    let ratio = res.column("ratio").unwrap();
    let above = t.iter().zip(&k).all(|(t, k)| *k >= (1.0 / t).ln_1p());
    // rows are in decreasing t
    let increasing = ratio.windows(2).all(|w| w[1] > w[0]);
    let last = ratio[2];
    Ok((
        above && increasing && last > 3.0,
        format!("k_upper = {k:.4?}, k/j = {ratio:.4?}, k/j at t = 0.02 is {last:.4} (> 3)"),
    ))
}

/// 200 trials per s with zero violations beyond 1e-6.
fn criterion3() -> Outcome {
    let res = run_lemma1(200, &[0.3, 0.5, 0.9], 0)?;
    let v = res.column("violations").unwrap();
    let ex = res.column("max_excess").unwrap();
    let total: f64 = v.iter().sum();
    Ok((
        total == 0.0,
        format!("violations {v:?}, max excess {:.3e} (tol {LEMMA1_TOL:e})", ex.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    ))
}

/// Similarity with scale 3 and a quarter turn: |M - 1| <= 1e-6 on 1000 pairs.
fn criterion4() -> Outcome {
    let f = similarity(3.0, rotation2(FRAC_PI_2), Point::new2(0.0, 0.0), &disk())?;
    let pairs = sample_pairs(&f.source, 1000, 4)?;
    let cfg = CheckConfig { level: 3, seed: 4, tol: 1e-6 };
    let (m, rep) = estimate_qh_constant(&f, &pairs, &cfg)?;
    Ok((
        (m - 1.0).abs() <= 1e-6,
        format!("M = {m:.12} on {} pairs (tol 1e-6)", rep.manifest.pairs),
    ))
}

/// Straight tube j against its closed form, the image j bounded, and the
/// growth from m = 5 to m = 20.
fn criterion5() -> Outcome {
    let r = 0.05;
    let ms = [2usize, 5, 10, 20];
    let res = run_example2(&ms, r, FRAC_PI_2)?;
    let jd = res.column("j_d").unwrap();
    let jdp = res.column("j_d_prime").unwrap();
    let bound = res.column("bound").unwrap();
    let closed_err = ms
        .iter()
        .zip(&jd)
        .map(|(&m, v)| (v - (2f64.sqrt() * (m - 1) as f64 / r).ln_1p()).abs())
        .fold(0.0, f64::max);
    let bounded = jdp.iter().zip(&bound).all(|(a, b)| a < b);
    let growth = jd[3] - jd[1];
    Ok((
        closed_err <= 1e-9 && bounded && growth >= 4f64.ln(),
        format!(
            "closed-form error {closed_err:.2e} (tol 1e-9), j_D' = {jdp:.3?} < {:.3}, j_D(20) - j_D(5) = {growth:.4} (>= log 4)",
            bound[0]
        ),
    ))
}

/// k_lower <= k_upper + tol; refine_k non-increasing; last two levels within
/// 2% on ball pairs.
fn criterion6() -> Outcome {
    let est = Estimator::shared();
    let o = Point::new2(0.0, 0.0);
    let domains = [disk(), Domain::slit_disk(), Domain::punctured_ball(o, 1.0, o)?];
    let mut bounds_ok = true;
    let mut checked = 0;
    for (i, d) in domains.iter().enumerate() {
        for (x, y) in sample_pairs(d, 40, 60 + i as u64)? {
            let lo = k_lower(d, &x, &y)?;
            let up = est.k_upper(d, &x, &y, 4)?;
            bounds_ok &= lo.value <= up.value + up.abs_tol + 1e-12;
            checked += 1;
        }
    }
    let ball = disk();
    let mut monotone = true;
    let mut worst_rel: f64 = 0.0;
    for (x, y) in sample_pairs(&ball, 20, 61)? {
        let seq = est.refine_k(&ball, &x, &y, 2, 4)?;
        let vals: Vec<f64> = seq.iter().filter_map(|(_, e)| e.map(|e| e.value)).collect();
        monotone &= vals.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let n = vals.len();
        worst_rel = worst_rel.max((vals[n - 2] - vals[n - 1]) / vals[n - 1]);
    }
    Ok((
        bounds_ok && monotone && worst_rel <= 0.02,
        format!(
            "k_lower <= k_upper on {checked} pairs: {bounds_ok}; refine_k levels 2-5 non-increasing: {monotone}; last-level change {:.3}% (<= 2%)",
            100.0 * worst_rel
        ),
    ))
}

/// c' within 10% across two levels on ball and punctured ball; straddling
/// slit pairs at least twice the ball.
fn criterion7() -> Outcome {
    let res = run_uniformity(4, 0)?;
    let names = res.text_column("domain").unwrap();
    let cp = res.column("c_prime").unwrap();
    let pick = |n: &str| -> Vec<f64> { names.iter().zip(&cp).filter(|(a, _)| *a == n).map(|(_, v)| *v).collect() };
    let (b, p, s) = (pick("ball"), pick("punctured_ball"), pick("slit_disk_straddling"));
    Ok((
        res.passed(),
        format!(
            "c' ball {b:.3?}, punctured {p:.3?} (stable within 10%), straddling slit {:.3} vs 2 x ball {:.3}",
            s[1],
            2.0 * b[1]
        ),
    ))
}

fn case1(f: &MapUnderTest, centers: usize, pairs: usize, level: u32, seed: u64) -> Result<(bool, String)> {
    let pairs = sample_local_pairs(&f.source, pairs, 0.5, seed)?;
    let centers: Vec<Point> = pairs.iter().take(centers).map(|p| p.0).collect();
    let cfg = CheckConfig { level, seed, tol: 1e-6 };
    let rep = local_to_global_qh(f, &centers, &pairs, &cfg)?;
    Ok((
        rep.verdicts["case1"],
        format!(
            "{}: M_local {:.3}, min slack {:.3e} over {} pairs",
            f.name,
            rep.constant("m_local").unwrap(),
            rep.constant("case1_min_slack").unwrap_or(f64::NAN),
            rep.constant("case1_pairs").unwrap_or(0.0)
        ),
    ))
}

/// k' <= 2 M_local k + tol on pairs with |x - y| <= d(x)/2.
fn criterion8() -> Outcome {
    let (a, ma) = case1(&radial_stretch(2.0, &disk())?, 3, 40, 3, 8)?;
    let (b, mb) = case1(&zigzag_straightener(4, 0.05, FRAC_PI_2)?, 3, 40, 3, 8)?;
    Ok((a && b, format!("{ma}; {mb} (tol 1e-6)")))
}

/// Sphere-stepping chains with λ = 1/2 along 50 near-geodesics per domain.
fn criterion9() -> Outcome {
    let est = Estimator::shared();
    let mut worst_step: f64 = 0.0;
    let mut worst_on_path: f64 = 0.0;
    let mut paths = 0;
    let mut links = 0;
    for (i, d) in [disk(), Domain::slit_disk()].iter().enumerate() {
        for (x, y) in sample_pairs(d, 50, 90 + i as u64)? {
            let path = est.extract_neargeodesic(d, &x, &y, 3)?;
            let chain = chain_decompose(d, &path, 0.5)?;
            paths += 1;
            for z in &chain {
                let off = path
                    .points()
                    .windows(2)
                    .map(|w| segment_distance(z, &w[0], &w[1]).0)
                    .fold(f64::INFINITY, f64::min);
                worst_on_path = worst_on_path.max(off);
            }
            for w in chain.windows(2) {
                let r = 0.5 * d.dist_to_boundary(&w[0])?;
                worst_step = worst_step.max((w[0].dist(&w[1]) - r).abs());
                links += 1;
            }
        }
    }
    Ok((
        paths == 100 && worst_step <= 1e-10 && worst_on_path <= 1e-10,
        format!(
            "{paths} paths terminated, {links} links, max ||z_i - z_i+1| - d(z_i)/2| = {worst_step:.2e}, max distance to path {worst_on_path:.2e} (tol 1e-10)"
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 9] = [
        criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8, criterion9,
    ];
    let mut all = true;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, msg) = match std::panic::catch_unwind(c) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".into()),
        };
        all &= ok;
        println!(
            "criterion {}: {} {msg} [{:.1}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
