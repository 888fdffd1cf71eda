use rayon::prelude::*;
use serde::Serialize;

use super::{CheckConfig, CheckReport, Witness};
use crate::domain::Domain;
use crate::error::Result;
use crate::geom::Point;
use crate::metric::{j_metric, Estimator};

/// Smallest `c` for which the near-geodesic from `x` to `y` satisfies both the
/// cigar condition at its vertices and `ℓ <= c |x - y|`.
fn arc_constant(domain: &Domain, pts: &[Point]) -> Result<(f64, f64)> {
    let mut cum = vec![0.0];
    for w in pts.windows(2) {
        cum.push(cum.last().unwrap() + w[0].dist(&w[1]));
    }
    let total = *cum.last().unwrap();
    let mut cigar: f64 = 0.0;
    for (z, s) in pts.iter().zip(&cum).skip(1).take(pts.len().saturating_sub(2)) {
        cigar = cigar.max(s.min(total - s) / domain.dist_to_boundary(z)?);
    }
    let chord = pts[0].dist(pts.last().unwrap());
    Ok((cigar, total / chord))
}

/// Uniformity constant along extracted near-geodesics, maximized over pairs.
pub fn uniformity_check(domain: &Domain, pairs: &[(Point, Point)], cfg: &CheckConfig) -> Result<(f64, CheckReport)> {
    let est = Estimator::shared();
    let per_pair: Result<Vec<(usize, f64, f64)>> = pairs
        .par_iter()
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, (x, y))| {
            let path = est.extract_neargeodesic(domain, x, y, cfg.level)?;
            let (cigar, quasi) = arc_constant(domain, path.points())?;
            Ok((i, cigar, quasi))
        })
        .collect();
    let per_pair = per_pair?;
    let mut rep = CheckReport::new("uniform", domain.name(), cfg);
    rep.manifest.pairs = per_pair.len();
    let cigar = per_pair.iter().map(|p| p.1).fold(0.0, f64::max);
    let quasi = per_pair.iter().map(|p| p.2).fold(1.0, f64::max);
    let c = cigar.max(quasi);
    rep.constants.insert("c_uniform".into(), c);
    rep.constants.insert("c_cigar".into(), cigar);
    rep.constants.insert("c_quasiconvex".into(), quasi);
    if let Some(&(i, a, b)) = per_pair.iter().max_by(|p, q| p.1.max(p.2).total_cmp(&q.1.max(q.2))) {
        rep.worst_witness.push(Witness {
            label: "c_uniform".into(),
            points: vec![pairs[i].0, pairs[i].1],
            value: a.max(b),
            bound: None,
        });
    }
    rep.verdicts.insert("finite".into(), c.is_finite());
    Ok((c, rep))
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremDFit {
    /// `max k / j` over the pairs.
    pub c_prime: f64,
    /// Slope and intercept of the least-squares line `k ≈ c1 j + d` that
    /// lies above every sample.
    pub c1: f64,
    pub d: f64,
    pub report: CheckReport,
}

/// Smallest feasible intercept for slope `a`, and the squared residual sum.
fn fit_cost(js: &[f64], ks: &[f64], a: f64) -> (f64, f64) {
    let b = js
        .iter()
        .zip(ks)
        .map(|(j, k)| k - a * j)
        .fold(0.0, f64::max);
    let cost = js.iter().zip(ks).map(|(j, k)| (k - a * j - b).powi(2)).sum();
    (b, cost)
}

fn constrained_fit(js: &[f64], ks: &[f64], a_max: f64) -> (f64, f64) {
    let n = js.len() as f64;
    let (mj, mk) = (js.iter().sum::<f64>() / n, ks.iter().sum::<f64>() / n);
    let sjj: f64 = js.iter().map(|j| (j - mj).powi(2)).sum();
    let sjk: f64 = js.iter().zip(ks).map(|(j, k)| (j - mj) * (k - mk)).sum();
    if sjj > 0.0 {
        let a = sjk / sjj;
        let b = mk - a * mj;
        let feasible = a >= 0.0 && b >= 0.0 && js.iter().zip(ks).all(|(j, k)| a * j + b >= k - 1e-12);
        if feasible {
            return (a, b);
        }
    }
    const GRID: usize = 400;
    let cost = |a: f64| fit_cost(js, ks, a).1;
    let step = a_max / GRID as f64;
    let best = (0..=GRID)
        .map(|i| i as f64 * step)
        .min_by(|p, q| cost(*p).total_cmp(&cost(*q)))
        .unwrap_or(0.0);
    let (mut lo, mut hi) = ((best - step).max(0.0), (best + step).min(a_max));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (c, d) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if cost(c) <= cost(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    let a = if cost(0.5 * (lo + hi)) <= cost(best) { 0.5 * (lo + hi) } else { best };
    (a, fit_cost(js, ks, a).0)
}

/// `c' = max k_upper / j` and the constrained affine fit of `k_upper`
/// against `j`. Pairs with `j = 0` are skipped.
pub fn theorem_d_fit(domain: &Domain, pairs: &[(Point, Point)], cfg: &CheckConfig) -> Result<TheoremDFit> {
    let est = Estimator::shared();
    let rows: Result<Vec<(usize, f64, f64)>> = pairs
        .par_iter()
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, (x, y))| {
            let j = j_metric(domain, x, y)?;
            let k = est.k_upper(domain, x, y, cfg.level)?;
            Ok((i, j, k.value))
        })
        .collect();
    let rows: Vec<(usize, f64, f64)> = rows?.into_iter().filter(|r| r.1 > 0.0).collect();
    let mut rep = CheckReport::new("thmD", domain.name(), cfg);
    rep.manifest.pairs = rows.len();
    let worst = rows.iter().max_by(|p, q| (p.2 / p.1).total_cmp(&(q.2 / q.1)));
    let c_prime = worst.map_or(1.0, |r| r.2 / r.1);
    let js: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let ks: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let (c1, d) = if rows.is_empty() {
        (1.0, 0.0)
    } else {
        constrained_fit(&js, &ks, 2.0 * c_prime + 1.0)
    };
    rep.constants.insert("c_prime".into(), c_prime);
    rep.constants.insert("c1".into(), c1);
    rep.constants.insert("d".into(), d);
    if let Some(&(i, j, k)) = worst {
        rep.worst_witness.push(Witness {
            label: "c_prime".into(),
            points: vec![pairs[i].0, pairs[i].1],
            value: k / j,
            bound: None,
        });
    }
    rep.verdicts.insert("at_least_one".into(), c_prime >= 1.0 - cfg.tol);
    Ok(TheoremDFit { c_prime, c1, d, report: rep })
}
