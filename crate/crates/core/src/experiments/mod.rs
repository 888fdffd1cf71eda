//! Scripted tables: the slit-disk and broken-tube examples, the ball segment
//! bound, and the uniformity comparison.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::checks::{sample_pairs, theorem_d_fit, uniformity_check, CheckConfig};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::maps::{zigzag_straightener, StraightenerParams};
use crate::metric::{j_metric, k_lower, lemma1_bound, qh_length, Estimator, Path, DEFAULT_EDGE_TOL};

pub const EXPERIMENTS: [&str; 4] = ["example1", "example2", "lemma1", "uniformity"];

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentManifest {
    pub experiment: String,
    pub seed: u64,
    pub level: Option<u32>,
    pub tol: f64,
    pub edge_tol: f64,
    pub params: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub verdicts: BTreeMap<String, bool>,
    pub manifest: ExperimentManifest,
}

impl ExperimentResult {
    fn new(name: &str, columns: &[&str], manifest: ExperimentManifest) -> Self {
        ExperimentResult {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: BTreeMap::new(),
            manifest,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    /// Numeric column by name; non-numeric cells read as NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn text_column(&self, name: &str) -> Option<Vec<String>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[i].as_str().map(String::from).unwrap_or_else(|| r[i].to_string()))
                .collect(),
        )
    }
}

fn manifest(name: &str, seed: u64, level: Option<u32>, tol: f64, params: Value) -> ExperimentManifest {
    ExperimentManifest {
        experiment: name.into(),
        seed,
        level,
        tol,
        edge_tol: DEFAULT_EDGE_TOL,
        params,
    }
}

/// Pairs `(1/2, ±t)` in the slit disk: `j` is exactly `log 3` and `k` is at
/// least `log(1 + 1/t)`.
pub fn run_example1(t_values: &[f64], level: u32) -> Result<ExperimentResult> {
    if t_values.is_empty() {
        return Err(Error::validation("t", "need at least one value"));
    }
    let slit = Domain::slit_disk();
    let mut res = ExperimentResult::new(
        "example1",
        &["t", "j", "k_upper", "k_lower", "bound", "ratio"],
        manifest("example1", 0, Some(level), 1e-12, json!({ "t": t_values })),
    );
    let est = Estimator::shared();
    let mut j_ok = true;
    let mut k_ok = true;
    let mut by_t = Vec::new();
    for &t in t_values {
        if !(t > 0.0 && t <= 0.3) {
            return Err(Error::validation("t", format!("{t} is outside (0, 0.3]")));
        }
        let (x, y) = (Point::new2(0.5, t), Point::new2(0.5, -t));
        // the slit must be the nearest boundary piece
        if (slit.dist_to_boundary(&x)? - t).abs() > 1e-15 {
            return Err(Error::validation("t", format!("at t = {t} the circle is nearer than the slit")));
        }
        let j = j_metric(&slit, &x, &y)?;
        let k = est.k_upper(&slit, &x, &y, level)?;
        let lo = k_lower(&slit, &x, &y)?;
        let bound = (1.0 / t).ln_1p();
        j_ok &= (j - 3f64.ln()).abs() <= 1e-12;
        k_ok &= k.value >= bound;
        by_t.push((t, k.value / j));
        res.rows
            .push(vec![json!(t), json!(j), json!(k.value), json!(lo.value), json!(bound), json!(k.value / j)]);
    }
    by_t.sort_by(|a, b| b.0.total_cmp(&a.0));
    let increasing = by_t.windows(2).all(|w| w[1].1 > w[0].1);
    res.verdicts.insert("j_equals_log3".into(), j_ok);
    res.verdicts.insert("k_above_bound".into(), k_ok);
    res.verdicts.insert("ratio_increasing".into(), increasing);
    Ok(res)
}

/// Diameter of the square layout box of a straightener.
fn box_diameter(p: &StraightenerParams) -> f64 {
    2.0 * p.half_width() * 2f64.sqrt()
}

/// Axis points at the middles of the first and last segments of the straight
/// tube, their images in the zigzag tube, and both j-metrics.
pub fn run_example2(m_values: &[usize], r: f64, bend: f64) -> Result<ExperimentResult> {
    if m_values.is_empty() {
        return Err(Error::validation("m", "need at least one value"));
    }
    let mut res = ExperimentResult::new(
        "example2",
        &["m", "j_d", "j_d_closed_form", "j_d_prime", "m_hat", "k_const", "bound"],
        manifest(
            "example2",
            0,
            None,
            1e-9,
            json!({ "m": m_values, "r": r, "bend_degrees": bend.to_degrees() }),
        ),
    );
    let mut closed_ok = true;
    let mut bounded = true;
    let mut jd = Vec::new();
    for &m in m_values {
        if m < 2 {
            return Err(Error::validation("m", "need m >= 2 so that x != y"));
        }
        let params = StraightenerParams::new(m, r, bend);
        let f = zigzag_straightener(m, r, bend)?;
        let ell = params.segment_length;
        let x = Point::new2(0.5 * ell, 0.0);
        let y = Point::new2(0.5 * ell + (m - 1) as f64 * ell, 0.0);
        let j_d = j_metric(&f.source, &x, &y)?;
        let closed = (ell * (m - 1) as f64 / r).ln_1p();
        let (fx, fy) = (f.forward(&x), f.forward(&y));
        let j_dp = j_metric(&f.target, &fx, &fy)?;
        let m_hat = f.advertised.m_bilip.unwrap_or(1.0);
        let k_const = 2.0 * m_hat * box_diameter(&params);
        let bound = (k_const / r).ln_1p();
        closed_ok &= (j_d - closed).abs() <= 1e-9;
        bounded &= j_dp < bound;
        jd.push((m, j_d));
        res.rows.push(vec![
            json!(m),
            json!(j_d),
            json!(closed),
            json!(j_dp),
            json!(m_hat),
            json!(k_const),
            json!(bound),
        ]);
    }
    jd.sort_by_key(|p| p.0);
    res.verdicts.insert("j_d_closed_form".into(), closed_ok);
    res.verdicts.insert("j_d_prime_bounded".into(), bounded);
    res.verdicts
        .insert("j_d_increasing".into(), jd.windows(2).all(|w| w[1].1 > w[0].1));
    let at = |m: usize| jd.iter().find(|p| p.0 == m).map(|p| p.1);
    if let (Some(a), Some(b)) = (at(5), at(20)) {
        res.verdicts.insert("j_d_growth_5_to_20".into(), b - a >= 4f64.ln());
    }
    Ok(res)
}

/// Integration tolerance for the segment lengths in [`run_lemma1`].
pub const LEMMA1_TOL: f64 = 1e-6;

/// Random `x` in the unit ball, `y` with `|x - y| <= s d(x)`: the
/// quasihyperbolic length of `[x, y]` inside `B(x, d(x))` against the bound
/// `log(1 + |x - y|/d(x)) / (1 - s)`.
pub fn run_lemma1(trials: usize, s_values: &[f64], seed: u64) -> Result<ExperimentResult> {
    if trials == 0 {
        return Err(Error::validation("trials", "must be at least 1"));
    }
    let unit = Domain::ball(Point::new2(0.0, 0.0), 1.0)?;
    let mut res = ExperimentResult::new(
        "lemma1",
        &["s", "trials", "max_excess", "violations", "max_length_over_bound"],
        manifest(
            "lemma1",
            seed,
            None,
            LEMMA1_TOL,
            json!({ "trials": trials, "s": s_values }),
        ),
    );
    let mut clean = true;
    for (si, &s) in s_values.iter().enumerate() {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::validation("s", format!("{s} is outside (0, 1)")));
        }
        let sub = seed.wrapping_add(si as u64);
        let xs = unit.sample_interior(trials, 0.0, sub)?;
        let mut rng = ChaCha8Rng::seed_from_u64(sub ^ 0x1e55a);
        let ys: Vec<Point> = xs
            .iter()
            .map(|x| {
                let d = 1.0 - x.norm();
                let ang = rng.gen_range(0.0..std::f64::consts::TAU);
                let u = 1.0 - rng.gen::<f64>();
                *x + Point::new2(ang.cos(), ang.sin()) * (u * s * d)
            })
            .collect();
        let rows: Result<Vec<(f64, f64)>> = xs
            .par_iter()
            .zip(&ys)
            .map(|(x, y)| {
                let d = unit.dist_to_boundary(x)?;
                let bx = Domain::ball(*x, d)?;
                let len = if x == y {
                    0.0
                } else {
                    qh_length(&Path::new(&bx, vec![*x, *y])?, &bx, 1e-3 * LEMMA1_TOL)?.value
                };
                let bound = lemma1_bound(&unit, x, y, s)?;
                Ok((len - bound, if bound > 0.0 { len / bound } else { 0.0 }))
            })
            .collect();
        let rows = rows?;
        let max_excess = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
        let violations = rows.iter().filter(|r| r.0 > LEMMA1_TOL).count();
        let max_ratio = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        clean &= violations == 0;
        res.rows.push(vec![
            json!(s),
            json!(trials),
            json!(max_excess),
            json!(violations),
            json!(max_ratio),
        ]);
    }
    res.verdicts.insert("no_violations".into(), clean);
    Ok(res)
}

/// Pairs straddling the slit, `(1/2, ±t)` and shifted copies.
pub fn slit_straddling_pairs(t: f64) -> Vec<(Point, Point)> {
    [0.3, 0.5, 0.7]
        .iter()
        .map(|&a| (Point::new2(a, t), Point::new2(a, -t)))
        .collect()
}

pub const UNIFORMITY_PAIRS: usize = 60;

/// Uniformity constant and `k`-versus-`j` fit for the ball, the punctured
/// ball and the slit disk at levels `resolution - 1` and `resolution`.
pub fn run_uniformity(resolution: u32, seed: u64) -> Result<ExperimentResult> {
    if resolution < 3 {
        return Err(Error::validation("level", "need a resolution of at least 3"));
    }
    let levels = [resolution - 1, resolution];
    let o = Point::new2(0.0, 0.0);
    let ball = Domain::ball(o, 1.0)?.with_name("ball");
    let punct = Domain::punctured_ball(o, 1.0, o)?.with_name("punctured_ball");
    let slit = Domain::slit_disk().with_name("slit_disk");
    let mut res = ExperimentResult::new(
        "uniformity",
        &["domain", "level", "pairs", "c_uniform", "c_prime", "c1", "d"],
        manifest(
            "uniformity",
            seed,
            Some(resolution),
            0.1,
            json!({ "levels": levels, "pairs": UNIFORMITY_PAIRS, "straddle_t": 0.02 }),
        ),
    );
    let mut straddle = sample_pairs(&slit, UNIFORMITY_PAIRS, seed)?;
    straddle.extend(slit_straddling_pairs(0.02));
    let cases: Vec<(&str, &Domain, Vec<(Point, Point)>)> = vec![
        ("ball", &ball, sample_pairs(&ball, UNIFORMITY_PAIRS, seed)?),
        ("punctured_ball", &punct, sample_pairs(&punct, UNIFORMITY_PAIRS, seed)?),
        ("slit_disk", &slit, sample_pairs(&slit, UNIFORMITY_PAIRS, seed)?),
        ("slit_disk_straddling", &slit, straddle),
    ];
    let mut c_prime: BTreeMap<(String, u32), f64> = BTreeMap::new();
    for (name, dom, pairs) in &cases {
        for &level in &levels {
            let cfg = CheckConfig { level, seed, tol: 1e-6 };
            let fit = theorem_d_fit(dom, pairs, &cfg)?;
            let (c, _) = uniformity_check(dom, pairs, &cfg)?;
            c_prime.insert((name.to_string(), level), fit.c_prime);
            res.rows.push(vec![
                json!(name),
                json!(level),
                json!(pairs.len()),
                json!(c),
                json!(fit.c_prime),
                json!(fit.c1),
                json!(fit.d),
            ]);
        }
    }
    let get = |n: &str, l: u32| c_prime[&(n.to_string(), l)];
    let stable = |n: &str| {
        let (a, b) = (get(n, levels[0]), get(n, levels[1]));
        (a - b).abs() <= 0.1 * b
    };
    res.verdicts.insert("ball_stable".into(), stable("ball"));
    res.verdicts.insert("punctured_ball_stable".into(), stable("punctured_ball"));
    res.verdicts.insert(
        "slit_contrast".into(),
        get("slit_disk_straddling", resolution) >= 2.0 * get("ball", resolution),
    );
    Ok(res)
}

/// Runs an experiment by name with its default parameters at `level`.
pub fn run_named(name: &str, level: u32, seed: u64) -> Result<ExperimentResult> {
    match name {
        "example1" => run_example1(&[0.1, 0.05, 0.02], level),
        "example2" => run_example2(&[2, 5, 10, 20], 0.05, std::f64::consts::FRAC_PI_2),
        "lemma1" => run_lemma1(200, &[0.3, 0.5, 0.9], seed),
        "uniformity" => run_uniformity(level, seed),
        other => Err(Error::validation("experiment", format!("unknown experiment `{other}`"))),
    }
}
