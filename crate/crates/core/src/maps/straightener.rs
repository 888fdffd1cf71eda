//! Locally bilipschitz map from a straight planar tube onto a tube around a
//! zigzag polyline folded into a fixed box.
//!
//! Away from the vertices the map is the rigid motion that carries the axis
//! `[(i-1)ℓ, iℓ] × {0}` onto segment `i`. In the slab `|s - iℓ| <= w` around
//! vertex `i`, each fiber `v = const` is mapped, proportionally to arclength,
//! onto the parallel curve at signed distance `v` from the polyline: two
//! straight pieces joined by an arc of radius `|v|` on the outer side of the
//! bend, or by the corner on the bisector on the inner side. The fiber
//! `v = 0` goes onto the axis itself.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Advertised, MapUnderTest, PointMap};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{segment_distance, Point};

/// Clearance between non-adjacent axis segments, in tube radii.
const CLEARANCE_RADII: f64 = 4.0;
/// Half-width of the vertex slabs, in tube radii.
const SLAB_RADII: f64 = 2.0;
const LAYOUT_BUDGET: usize = 2_000_000;
const CALIBRATION_PAIRS: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub struct StraightenerParams {
    pub segments: usize,
    pub radius: f64,
    /// Turning angle at each vertex, radians.
    pub bend: f64,
    pub segment_length: f64,
    /// Half-width of the square the vertices must stay in (default `3ℓ`).
    pub box_half_width: Option<f64>,
}

impl StraightenerParams {
    pub fn new(segments: usize, radius: f64, bend: f64) -> Self {
        StraightenerParams {
            segments,
            radius,
            bend,
            segment_length: SQRT_2,
            box_half_width: None,
        }
    }

    pub fn half_width(&self) -> f64 {
        self.box_half_width.unwrap_or(3.0 * self.segment_length)
    }

    fn validate(&self) -> Result<()> {
        if self.segments == 0 {
            return Err(Error::validation("segments", "need at least one segment"));
        }
        if !(self.segment_length > 0.0 && self.segment_length.is_finite()) {
            return Err(Error::validation("segment_length", "must be positive"));
        }
        if !(self.radius > 0.0) || self.radius > self.segment_length / 10.0 + 1e-15 {
            return Err(Error::validation(
                "radius",
                format!(
                    "must be positive and at most 1/10 of the segment length ({})",
                    self.segment_length
                ),
            ));
        }
        if !(self.bend > 0.0 && self.bend <= FRAC_PI_2 + 1e-12) {
            return Err(Error::validation("bend", "must lie in (0, pi/2]"));
        }
        if !(self.half_width() > 0.0) {
            return Err(Error::validation("box_half_width", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ZigzagStraightener {
    ell: f64,
    r: f64,
    w: f64,
    beta: f64,
    t_half: f64,
    vertices: Vec<Point>,
    dirs: Vec<Point>,
    /// +1 for a left turn, -1 for a right turn, one per interior vertex.
    turns: Vec<f64>,
}

fn seg_seg_distance(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    let o = |p: &Point, q: &Point, r: &Point| (*q - *p).cross2(&(*r - *p));
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    segment_distance(a, c, d)
        .0
        .min(segment_distance(b, c, d).0)
        .min(segment_distance(c, a, b).0)
        .min(segment_distance(d, a, b).0)
}

/// Depth-first search over turn signs for a self-avoiding zigzag that stays
/// in the box. Alternating turns are tried first.
fn layout(p: &StraightenerParams) -> Result<(Vec<Point>, Vec<f64>)> {
    let m = p.segments;
    let half = p.half_width();
    let clearance = CLEARANCE_RADII * p.radius;
    let mut verts = vec![Point::new2(0.0, 0.0)];
    let mut headings = vec![0.0f64];
    let mut turns: Vec<f64> = Vec::new();
    // per depth: which of the two choices has been tried
    let mut tried: Vec<u8> = Vec::new();
    let mut budget = LAYOUT_BUDGET;
    let step = |from: &Point, heading: f64| *from + Point::new2(heading.cos(), heading.sin()) * p.segment_length;
    let fits = |verts: &[Point], q: &Point| {
        if q.get(0).abs() > half || q.get(1).abs() > half {
            return false;
        }
        let a = verts[verts.len() - 1];
        let k = verts.len();
        (0..k.saturating_sub(2)).all(|j| seg_seg_distance(&a, q, &verts[j], &verts[j + 1]) >= clearance)
    };
    let first = step(&verts[0], 0.0);
    if !fits(&verts, &first) {
        return Err(Error::validation("box_half_width", "box too small for one segment"));
    }
    verts.push(first);
    while verts.len() < m + 1 {
        if budget == 0 {
            return Err(Error::validation(
                "segments",
                format!("no self-avoiding zigzag with {m} segments fits the box"),
            ));
        }
        budget -= 1;
        let depth = turns.len();
        if tried.len() <= depth {
            tried.push(0);
        }
        if tried[depth] >= 2 {
            // backtrack
            tried.pop();
            if turns.pop().is_none() {
                return Err(Error::validation(
                    "segments",
                    format!("no self-avoiding zigzag with {m} segments fits the box"),
                ));
            }
            verts.pop();
            headings.pop();
            continue;
        }
        let prefer = turns.last().map_or(1.0, |t| -t);
        let sign = if tried[depth] == 0 { prefer } else { -prefer };
        tried[depth] += 1;
        let heading = headings.last().unwrap() + sign * p.bend;
        let q = step(verts.last().unwrap(), heading);
        if fits(&verts, &q) {
            verts.push(q);
            headings.push(heading);
            turns.push(sign);
        }
    }
    Ok((verts, turns))
}

impl ZigzagStraightener {
    pub fn new(p: &StraightenerParams) -> Result<Self> {
        p.validate()?;
        let (vertices, turns) = layout(p)?;
        let dirs = vertices
            .windows(2)
            .map(|w| (w[1] - w[0]) * (1.0 / w[0].dist(&w[1])))
            .collect();
        Ok(ZigzagStraightener {
            ell: p.segment_length,
            r: p.radius,
            w: SLAB_RADII * p.radius,
            beta: p.bend,
            t_half: (0.5 * p.bend).tan(),
            vertices,
            dirs,
            turns,
        })
    }

    /// Builds the map together with its source and target domains and a
    /// calibrated local bilipschitz constant.
    pub fn build(p: &StraightenerParams) -> Result<MapUnderTest> {
        let z = ZigzagStraightener::new(p)?;
        let source = Domain::straight_tube(2, z.total_length(), z.r)?.with_name("straight tube");
        let target = Domain::zigzag_tube(z.vertices.clone(), z.r)?.with_name("zigzag tube");
        let m_hat = z.calibrate(&source, CALIBRATION_PAIRS, 0)?;
        let name = format!(
            "zigzag_straightener(m={}, r={}, bend={:.6})",
            p.segments, p.radius, p.bend
        );
        Ok(MapUnderTest {
            name,
            source,
            target,
            map: Arc::new(z),
            advertised: Advertised {
                m_qh: Some(m_hat * m_hat),
                m_bilip: Some(m_hat),
                k_qc: None,
                notes: format!(
                    "local bilipschitz constant calibrated on {CALIBRATION_PAIRS} pairs with |x-y| <= r/4 (seed 0); m_qh = m_bilip^2"
                ),
            },
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn total_length(&self) -> f64 {
        self.ell * self.dirs.len() as f64
    }

    pub fn segment_length(&self) -> f64 {
        self.ell
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// Point at arclength `s` along the zigzag axis.
    pub fn axis_point(&self, s: f64) -> Point {
        let k = ((s / self.ell).floor().max(0.0) as usize).min(self.dirs.len() - 1);
        self.vertices[k] + self.dirs[k] * (s - k as f64 * self.ell)
    }

    /// Largest difference quotient of the map and its inverse over seeded
    /// pairs with `|x - y| <= r/4`.
    pub fn calibrate(&self, source: &Domain, pairs: usize, seed: u64) -> Result<f64> {
        let xs = source.sample_interior(pairs, 0.0, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut worst: f64 = 1.0;
        for x in xs {
            let rad = 0.25 * self.r * rng.gen::<f64>().sqrt();
            let ang = rng.gen_range(0.0..std::f64::consts::TAU);
            let y = x + Point::new2(ang.cos(), ang.sin()) * rad;
            if rad == 0.0 || !source.contains(&y) {
                continue;
            }
            let q = self.forward(&x).dist(&self.forward(&y)) / x.dist(&y);
            worst = worst.max(q).max(1.0 / q);
        }
        Ok(worst)
    }

    fn fiber_length(&self, v: f64) -> f64 {
        if v <= 0.0 {
            2.0 * self.w - v * self.beta
        } else {
            2.0 * self.w - 2.0 * v * self.t_half
        }
    }

    /// Slab map in the vertex frame where the turn is to the left.
    fn slab_forward(&self, sigma: f64, v: f64) -> (f64, f64) {
        let w = self.w;
        let len = self.fiber_length(v);
        let tau = (sigma + w) * len / (2.0 * w);
        let (sb, cb) = self.beta.sin_cos();
        let out = |a: f64| (a * cb - v * sb, a * sb + v * cb);
        if v <= 0.0 {
            let rho = -v;
            if tau <= w {
                (tau - w, v)
            } else if tau <= w + rho * self.beta {
                let phi = (tau - w) / rho;
                (rho * phi.sin(), -rho * phi.cos())
            } else {
                out(tau - w - rho * self.beta)
            }
        } else if tau <= w - v * self.t_half {
            (tau - w, v)
        } else {
            out(tau - w + 2.0 * v * self.t_half)
        }
    }

    fn slab_inverse(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let w = self.w;
        let (sb, cb) = self.beta.sin_cos();
        let xo = x * cb + y * sb;
        let yo = -x * sb + y * cb;
        let (tau, v) = if (-w..=0.0).contains(&x) && (y <= 0.0 || x <= -y * self.t_half) {
            (x + w, y)
        } else if x >= 0.0 && xo <= 0.0 {
            let rho = x.hypot(y);
            let phi = x.atan2(-y).clamp(0.0, self.beta);
            (w + rho * phi, -rho)
        } else if (0.0..=w).contains(&xo) && (yo <= 0.0 || xo >= yo * self.t_half) {
            (self.fiber_length(yo) - w + xo, yo)
        } else {
            return None;
        };
        Some((tau * 2.0 * w / self.fiber_length(v) - w, v))
    }

    fn source_axis_distance(&self, s: f64, v: f64) -> f64 {
        let l = self.total_length();
        if s < 0.0 {
            s.hypot(v)
        } else if s > l {
            (s - l).hypot(v)
        } else {
            v.abs()
        }
    }
}

impl PointMap for ZigzagStraightener {
    fn name(&self) -> String {
        format!("zigzag_straightener(m={})", self.dirs.len())
    }

    fn forward(&self, p: &Point) -> Point {
        let (s, v) = (p.get(0), p.get(1));
        let m = self.dirs.len();
        let i = (s / self.ell).round();
        if i >= 1.0 && (i as usize) < m && (s - i * self.ell).abs() <= self.w {
            let i = i as usize;
            let sg = self.turns[i - 1];
            let (x, y) = self.slab_forward(s - i as f64 * self.ell, sg * v);
            let e = self.dirs[i - 1];
            return self.vertices[i] + e * x + e.perp() * (sg * y);
        }
        let k = ((s / self.ell).floor().max(0.0) as usize).min(m - 1);
        let e = self.dirs[k];
        self.vertices[k] + e * (s - k as f64 * self.ell) + e.perp() * v
    }

    fn inverse(&self, q: &Point) -> Point {
        let m = self.dirs.len();
        let mut best: Option<(f64, Point)> = None;
        let mut offer = |s: f64, v: f64| {
            let score = self.source_axis_distance(s, v);
            if best.as_ref().is_none_or(|b| score < b.0) {
                best = Some((score, Point::new2(s, v)));
            }
        };
        for i in 1..m {
            let vtx = self.vertices[i];
            if q.dist(&vtx) > self.w + 2.0 * self.r {
                continue;
            }
            let sg = self.turns[i - 1];
            let e = self.dirs[i - 1];
            let d = *q - vtx;
            if let Some((sigma, v)) = self.slab_inverse(d.dot(&e), sg * d.dot(&e.perp())) {
                offer(i as f64 * self.ell + sigma, sg * v);
            }
        }
        for k in 0..m {
            let e = self.dirs[k];
            let d = *q - self.vertices[k];
            let x = d.dot(&e);
            let lo = if k == 0 { f64::NEG_INFINITY } else { self.w };
            let hi = if k == m - 1 { f64::INFINITY } else { self.ell - self.w };
            if x >= lo && x <= hi {
                offer(k as f64 * self.ell + x, d.dot(&e.perp()));
            }
        }
        best.map(|b| b.1).unwrap_or(Point::new2(f64::NAN, f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_stays_in_box_with_clearance() {
        let p = StraightenerParams::new(20, 0.05, FRAC_PI_2);
        let (v, turns) = layout(&p).unwrap();
        assert_eq!(v.len(), 21);
        assert_eq!(turns.len(), 19);
        let half = p.half_width();
        assert!(v.iter().all(|q| q.get(0).abs() <= half && q.get(1).abs() <= half));
        for i in 0..20 {
            for j in i + 2..20 {
                assert!(seg_seg_distance(&v[i], &v[i + 1], &v[j], &v[j + 1]) >= 0.2 - 1e-12);
            }
        }
    }

    #[test]
    fn slab_edges_match_rigid_parts() {
        let z = ZigzagStraightener::new(&StraightenerParams::new(3, 0.05, FRAC_PI_2)).unwrap();
        let ell = z.segment_length();
        for &v in &[-0.049, -0.02, 0.0, 0.02, 0.049] {
            for &s in &[ell - z.w, ell + z.w] {
                let a = z.forward(&Point::new2(s - 1e-12, v));
                let b = z.forward(&Point::new2(s + 1e-12, v));
                assert!(a.dist(&b) < 1e-9, "{s} {v}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn axis_goes_to_axis() {
        let z = ZigzagStraightener::new(&StraightenerParams::new(5, 0.05, 1.0)).unwrap();
        for k in 0..200 {
            let s = z.total_length() * k as f64 / 199.0;
            let p = z.forward(&Point::new2(s, 0.0));
            assert!(p.dist(&z.axis_point(s)) < 1e-12);
        }
    }

    #[test]
    fn inverse_undoes_forward_in_slabs() {
        let z = ZigzagStraightener::new(&StraightenerParams::new(4, 0.05, FRAC_PI_2)).unwrap();
        let ell = z.segment_length();
        for i in 1..4 {
            for a in -10..=10 {
                for b in -9..=9 {
                    let s = i as f64 * ell + z.w * a as f64 / 10.0;
                    let v = 0.05 * b as f64 / 10.0;
                    let p = Point::new2(s, v);
                    let back = z.inverse(&z.forward(&p));
                    assert!(back.dist(&p) < 1e-12, "{p} -> {back}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ZigzagStraightener::new(&StraightenerParams::new(3, 0.2, 1.0)).is_err());
        assert!(ZigzagStraightener::new(&StraightenerParams::new(3, 0.05, 2.0)).is_err());
        assert!(ZigzagStraightener::new(&StraightenerParams::new(0, 0.05, 1.0)).is_err());
    }
}
