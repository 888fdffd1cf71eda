use rayon::prelude::*;

use super::sample::sample_pairs;
use super::{triple_ratio, CheckConfig, CheckReport, EmpiricalGauge, Triple, Witness};
use crate::domain::{Domain, ImageSet};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::maps::MapUnderTest;
use crate::metric::{j_metric, Estimator};

/// Pairs used per maximal ball besides the checked pairs centred there.
const PAIRS_PER_BALL: usize = 6;
const IMAGE_CHORD_TOL: f64 = 1e-5;

/// Both metrics on one pair and on its image.
#[derive(Debug, Clone)]
struct PairEval {
    x: Point,
    y: Point,
    fx: Point,
    fy: Point,
    k: f64,
    kp: f64,
    j: f64,
    jp: f64,
    tol: f64,
}

impl PairEval {
    /// `max(k'/k, k/k')` with upper estimates, each denominator floored by
    /// the j-metric.
    fn ratio(&self) -> f64 {
        (self.kp / self.j.max(self.k)).max(self.k / self.jp.max(self.kp))
    }

    /// Certified lower bound for the true `max(k'/k, k/k')`.
    fn certified_ratio(&self) -> f64 {
        (self.jp / self.k).max(self.j / self.kp)
    }

    fn points(&self) -> Vec<Point> {
        vec![self.x, self.y, self.fx, self.fy]
    }
}

fn image(f: &MapUnderTest, target: &Domain, p: &Point) -> Result<Point> {
    let q = f.forward(p);
    if target.contains(&q) {
        Ok(q)
    } else {
        Err(Error::MapConsistency(format!(
            "{} sends {p} to {q}, outside `{}`",
            f.name,
            target.name()
        )))
    }
}

fn eval_pairs(
    f: &MapUnderTest,
    source: &Domain,
    target: &Domain,
    pairs: &[(Point, Point)],
    level: u32,
) -> Result<Vec<PairEval>> {
    let est = Estimator::shared();
    let evals: Result<Vec<Option<PairEval>>> = pairs
        .par_iter()
        .map(|(x, y)| {
            if x == y {
                return Ok(None);
            }
            let (fx, fy) = (image(f, target, x)?, image(f, target, y)?);
            let k = est.k_upper(source, x, y, level)?;
            let kp = est.k_upper(target, &fx, &fy, level)?;
            Ok(Some(PairEval {
                x: *x,
                y: *y,
                fx,
                fy,
                k: k.value,
                kp: kp.value,
                j: j_metric(source, x, y)?,
                jp: j_metric(target, &fx, &fy)?,
                tol: k.abs_tol + kp.abs_tol,
            }))
        })
        .collect();
    Ok(evals?.into_iter().flatten().collect())
}

fn argmax<T>(items: &[T], key: impl Fn(&T) -> f64) -> Option<(usize, f64)> {
    items
        .iter()
        .enumerate()
        .map(|(i, it)| (i, key(it)))
        .fold(None, |best, (i, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
}

fn qh_from_evals(evals: &[PairEval]) -> (f64, f64, Option<usize>) {
    let m = argmax(evals, PairEval::ratio);
    let lower = evals.iter().map(PairEval::certified_ratio).fold(0.0, f64::max);
    match m {
        Some((i, v)) => (v.max(1.0), lower, Some(i)),
        None => (1.0, lower, None),
    }
}

/// Largest two-sided distortion of the quasihyperbolic distance over the
/// sampled pairs. Pairs with `x = y` are skipped.
pub fn estimate_qh_constant(
    f: &MapUnderTest,
    pairs: &[(Point, Point)],
    cfg: &CheckConfig,
) -> Result<(f64, CheckReport)> {
    let evals = eval_pairs(f, &f.source, &f.target, pairs, cfg.level)?;
    let (m, lower, at) = qh_from_evals(&evals);
    let mut rep = CheckReport::new("qh", &f.name, cfg);
    rep.manifest.pairs = evals.len();
    rep.constants.insert("m_qh".into(), m);
    rep.constants.insert("m_qh_certified_lower".into(), lower);
    if let Some(i) = at {
        rep.worst_witness.push(Witness {
            label: "m_qh".into(),
            points: evals[i].points(),
            value: m,
            bound: f.advertised.m_qh,
        });
    }
    rep.verdicts.insert("at_least_one".into(), m >= 1.0 - cfg.tol);
    if let Some(adv) = f.advertised.m_qh {
        rep.verdicts.insert("within_advertised".into(), m <= adv + cfg.tol);
    }
    Ok((m, rep))
}

/// `(k - C)/M <= k' <= M k + C` on every pair. A pair fails only when the
/// j-metric of one side already exceeds the bound built from the graph upper
/// estimate of the other.
pub fn check_cqh(f: &MapUnderTest, pairs: &[(Point, Point)], m: f64, c: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    if !(m >= 1.0) {
        return Err(Error::validation("M", "must be at least 1"));
    }
    if !(c >= 0.0) {
        return Err(Error::validation("C", "must be non-negative"));
    }
    let evals = eval_pairs(f, &f.source, &f.target, pairs, cfg.level)?;
    let excess = |e: &PairEval| (e.jp - m * e.k).max(e.j - m * e.kp);
    let mut rep = CheckReport::new("cqh", &f.name, cfg);
    rep.manifest.pairs = evals.len();
    rep.constants.insert("M".into(), m);
    rep.constants.insert("C".into(), c);
    let worst = argmax(&evals, excess);
    let c_hat = worst.map_or(0.0, |(_, v)| v.max(0.0));
    rep.constants.insert("c_cqh".into(), c_hat);
    if let Some((i, v)) = worst {
        rep.worst_witness.push(Witness {
            label: "cqh".into(),
            points: evals[i].points(),
            value: v,
            bound: Some(c + cfg.tol),
        });
    }
    rep.verdicts
        .insert("cqh".into(), evals.iter().all(|e| excess(e) <= c + cfg.tol + e.tol));
    Ok(rep)
}

fn solid_report(
    name: &str,
    f: &MapUnderTest,
    pairs: &[(Point, Point)],
    phi: &dyn Fn(f64) -> f64,
    inverse_too: bool,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let evals = eval_pairs(f, &f.source, &f.target, pairs, cfg.level)?;
    let mut rep = CheckReport::new(name, &f.name, cfg);
    rep.manifest.pairs = evals.len();
    let forward = |e: &PairEval| e.jp - phi(e.k) - e.tol;
    let backward = |e: &PairEval| e.j - phi(e.kp) - e.tol;
    let mut sides: Vec<(&str, &dyn Fn(&PairEval) -> f64)> = vec![("forward", &forward)];
    if inverse_too {
        sides.push(("inverse", &backward));
    }
    for (label, excess) in sides {
        if let Some((i, v)) = argmax(&evals, excess) {
            rep.constants.insert(format!("{label}_max_excess"), v);
            rep.worst_witness.push(Witness {
                label: label.into(),
                points: evals[i].points(),
                value: v,
                bound: Some(cfg.tol),
            });
            rep.verdicts.insert(label.into(), v <= cfg.tol);
        } else {
            rep.verdicts.insert(label.into(), true);
        }
    }
    Ok(rep)
}

/// `k'(f(x), f(y)) <= φ(k(x, y))` on every pair; fails only on certified
/// violations `j' > φ(k_upper)`.
pub fn check_semisolid(
    f: &MapUnderTest,
    pairs: &[(Point, Point)],
    phi: &dyn Fn(f64) -> f64,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    solid_report("semisolid", f, pairs, phi, false, cfg)
}

/// Semisolidity of both `f` and `f^-1` with the same gauge.
pub fn check_solid(
    f: &MapUnderTest,
    pairs: &[(Point, Point)],
    phi: &dyn Fn(f64) -> f64,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    solid_report("solid", f, pairs, phi, true, cfg)
}

/// Gauge of `|f(x) - f(y)| / d'(f(x))` against `|x - y| / d(x)`. Every pair
/// must satisfy `|x - y| < t0 d(x)`.
pub fn estimate_relative_theta(f: &MapUnderTest, pairs: &[(Point, Point)], t0: f64) -> Result<EmpiricalGauge> {
    if !(t0 > 0.0) {
        return Err(Error::validation("t0", "must be positive"));
    }
    let samples: Result<Vec<(f64, f64)>> = pairs
        .par_iter()
        .filter(|(x, y)| x != y)
        .map(|(x, y)| {
            let t = x.dist(y) / f.source.dist_to_boundary(x)?;
            if t >= t0 {
                return Err(Error::validation(
                    "pairs",
                    format!("pair {x}, {y} has |x - y| / d(x) = {t} >= t0 = {t0}"),
                ));
            }
            let (fx, fy) = (image(f, &f.target, x)?, image(f, &f.target, y)?);
            Ok((t, fx.dist(&fy) / f.target.dist_to_boundary(&fx)?))
        })
        .collect();
    EmpiricalGauge::from_samples("theta", samples?)
}

/// Gauge of `ρ(f(T))` against `ρ(T)` over triples in `B(center, q d(center))`.
pub fn estimate_qs_eta(f: &MapUnderTest, center: &Point, q: f64, triples: &[Triple]) -> Result<EmpiricalGauge> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::validation("q", "must lie in (0, 1)"));
    }
    let rad = q * f.source.dist_to_boundary(center)?;
    let samples: Result<Vec<(f64, f64)>> = triples
        .iter()
        .map(|t| {
            for p in [t.x, t.a, t.b] {
                if p.dist(center) > rad * (1.0 + 1e-12) {
                    return Err(Error::validation(
                        "triples",
                        format!("{p} lies outside B({center}, {rad})"),
                    ));
                }
            }
            let ft = t.map(|p| f.forward(p))?;
            Ok((triple_ratio(t), triple_ratio(&ft)))
        })
        .collect();
    EmpiricalGauge::from_samples("eta", samples?)
}

/// Maximal ball `B(x, d(x))` and its image as domains.
fn ball_and_image(f: &MapUnderTest, x: &Point) -> Result<(Domain, Domain)> {
    let d = f.source.dist_to_boundary(x)?;
    let ball = Domain::ball(*x, d)?.with_name(format!("B({x}, {d})"));
    let img = match f.map.as_similarity() {
        Some(sim) => ball.transformed(&sim),
        None => Domain::image(ImageSet::new(f.map.clone(), *x, d, IMAGE_CHORD_TOL)?),
    }
    .with_name(format!("f(B({x}, {d}))"));
    Ok((ball, img))
}

/// Restriction constant on maximal balls around `centers`, the global
/// constant on the whole domain, and the near-diagonal inequality
/// `k'(f(x), f(y)) <= 2 M_local k(x, y)` for checked pairs with
/// `|x - y| <= d(x)/2`.
pub fn local_to_global_qh(
    f: &MapUnderTest,
    centers: &[Point],
    pairs: &[(Point, Point)],
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    if centers.is_empty() {
        return Err(Error::validation("centers", "need at least one center"));
    }
    let mut rep = CheckReport::new("local-global", &f.name, cfg);
    let mut m_local: f64 = 1.0;
    let mut local_witness = None;
    for (ci, x) in centers.iter().enumerate() {
        let (ball, img) = ball_and_image(f, x)?;
        let d = f.source.dist_to_boundary(x)?;
        let mut local: Vec<(Point, Point)> = pairs
            .iter()
            .filter(|(a, b)| a == x && a.dist(b) < d)
            .copied()
            .collect();
        local.extend(sample_pairs(&ball, PAIRS_PER_BALL, cfg.seed.wrapping_add(ci as u64))?);
        let evals = eval_pairs(f, &ball, &img, &local, cfg.level)?;
        let (m, _, at) = qh_from_evals(&evals);
        if m > m_local {
            m_local = m;
            local_witness = at.map(|i| evals[i].points());
        }
    }
    let evals = eval_pairs(f, &f.source, &f.target, pairs, cfg.level)?;
    let (m_global, _, at) = qh_from_evals(&evals);
    let mut near = 0;
    let mut slack = f64::INFINITY;
    let mut certified_slack = f64::INFINITY;
    let mut worst = None;
    for (i, e) in evals.iter().enumerate() {
        let d = f.source.dist_to_boundary(&e.x)?;
        if e.x.dist(&e.y) > 0.5 * d {
            continue;
        }
        near += 1;
        let s = 2.0 * m_local * e.k + cfg.tol + e.tol - e.kp;
        certified_slack = certified_slack.min(2.0 * m_local * e.j - e.kp);
        if s < slack {
            slack = s;
            worst = Some(i);
        }
    }
    rep.manifest.pairs = evals.len();
    rep.manifest.centers = centers.len();
    rep.constants.insert("m_local".into(), m_local);
    rep.constants.insert("m_global".into(), m_global);
    rep.constants.insert("case1_pairs".into(), near as f64);
    if near > 0 {
        rep.constants.insert("case1_min_slack".into(), slack);
        rep.constants.insert("case1_min_slack_j".into(), certified_slack);
    } else {
        rep.notes.push("no checked pair satisfies |x - y| <= d(x)/2".into());
    }
    if let Some(p) = local_witness {
        rep.worst_witness.push(Witness {
            label: "m_local".into(),
            points: p,
            value: m_local,
            bound: None,
        });
    }
    if let Some(i) = at {
        rep.worst_witness.push(Witness {
            label: "m_global".into(),
            points: evals[i].points(),
            value: m_global,
            bound: None,
        });
    }
    if let Some(i) = worst {
        rep.worst_witness.push(Witness {
            label: "case1".into(),
            points: evals[i].points(),
            value: evals[i].kp,
            bound: Some(2.0 * m_local * evals[i].k + cfg.tol),
        });
    }
    rep.verdicts.insert("case1".into(), slack >= 0.0);
    Ok(rep)
}
