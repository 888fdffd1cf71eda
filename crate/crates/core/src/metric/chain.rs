//! Sphere-stepping chains along a path and the ball-restricted segment bound.

use super::path::Path;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Last parameter `t >= t0` in `[t0, 1]` with `|a + t (b - a) - z| = r`, given
/// that `|a + t0 (b - a) - z| <= r`. This is where the segment leaves the ball.
fn exit_parameter(a: &Point, b: &Point, z: &Point, r: f64, t0: f64) -> Option<f64> {
    let v = *b - *a;
    let w = *a - *z;
    let qa = v.dot(&v);
    let qb = 2.0 * v.dot(&w);
    let qc = w.dot(&w) - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // larger root, computed without cancellation
    let t = if qb >= 0.0 {
        (2.0 * qc) / (-qb - sq)
    } else {
        (-qb + sq) / (2.0 * qa)
    };
    let t = if t.is_finite() { t } else { (-qb + sq) / (2.0 * qa) };
    if t < t0 - 1e-15 || t > 1.0 + 1e-15 {
        return None;
    }
    Some(polish(a, b, z, r, t.clamp(t0, 1.0), t0))
}

/// Newton steps on `|p(t) - z|^2 = r^2`, then a bracketing safeguard.
fn polish(a: &Point, b: &Point, z: &Point, r: f64, mut t: f64, t0: f64) -> f64 {
    let v = *b - *a;
    let f = |t: f64| a.lerp(b, t).dist(z) - r;
    for _ in 0..4 {
        let p = a.lerp(b, t);
        let g = 2.0 * v.dot(&(p - *z));
        if g == 0.0 {
            break;
        }
        let nt = (t - ((p - *z).dot(&(p - *z)) - r * r) / g).clamp(t0, 1.0);
        if nt == t {
            break;
        }
        t = nt;
    }
    if f(t).abs() <= 1e-13 * r.max(1e-300) {
        return t;
    }
    // bisection between an inside and an outside parameter
    let (mut lo, mut hi) = if f(t) > 0.0 { (t0, t) } else { (t, 1.0) };
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return t;
    }
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if f(m) > 0.0 {
            hi = m;
        } else {
            lo = m;
        }
        if hi - lo <= 1e-16 {
            break;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// `z_1` = start; each next point is the first point of the path after `z_i`
/// on the sphere `S(z_i, λ d(z_i))`. Stops when the rest of the path stays in
/// the closed ball around the current point.
pub fn chain_decompose(domain: &Domain, path: &Path, lambda: f64) -> Result<Vec<Point>> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::validation("step_fraction", "must lie in (0, 1)"));
    }
    let pts = path.points();
    let mut chain = vec![pts[0]];
    let (mut seg, mut t0) = (0usize, 0.0f64);
    loop {
        let z = *chain.last().unwrap();
        let r = lambda * domain.dist_to_boundary(&z)?;
        let mut next = None;
        for (s, w) in pts.windows(2).enumerate().skip(seg) {
            let start = if s == seg { t0 } else { 0.0 };
            if let Some(t) = exit_parameter(&w[0], &w[1], &z, r, start) {
                // the start of this piece is inside the ball, so the first
                // sphere point after it is where the piece exits
                next = Some((s, t));
                break;
            }
        }
        match next {
            Some((s, t)) => {
                let p = pts[s].lerp(&pts[s + 1], t);
                if p == z {
                    break;
                }
                chain.push(p);
                seg = s;
                t0 = t;
            }
            None => break,
        }
    }
    Ok(chain)
}

/// `(1 / (1 - s)) log(1 + |x - y| / d(x))`, the bound on `k` inside the ball
/// `B(x, d(x))` for `|x - y| <= s d(x)`.
pub fn lemma1_bound(domain: &Domain, x: &Point, y: &Point, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::validation("s", "must lie in (0, 1)"));
    }
    let d = domain.dist_to_boundary(x)?;
    let dist = x.dist(y);
    if dist > s * d * (1.0 + 1e-12) {
        return Err(Error::validation(
            "y",
            format!("|x - y| = {dist} exceeds s d(x) = {}", s * d),
        ));
    }
    Ok((dist / d).ln_1p() / (1.0 - s))
}
