//! Planar tube around a polyline: the union of open discs of radius `r`
//! centred on the axis.
//!
//! `r - dist(p, axis)` is only a lower bound for the boundary distance: it is
//! exact on straight stretches and on the outer side of a bend, but too small
//! near an inner corner, where the nearest boundary point is the corner where
//! the two offset lines meet. The exact value is the minimum of `|p - c|` over
//! boundary points `c` that are either perpendicular feet on the offset
//! segments, radial projections onto the vertex circles, or the (precomputed)
//! corner points where two boundary pieces cross.

use crate::error::{Error, Result};
use crate::geom::{segment_distance, Point};

#[derive(Debug, Clone)]
pub struct ZigzagGeometry {
    vertices: Vec<Point>,
    radius: f64,
    /// Boundary points where two pieces of `{dist = r}` meet.
    corners: Vec<Point>,
}

impl ZigzagGeometry {
    pub fn new(vertices: Vec<Point>, radius: f64) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::validation("vertices", "need at least two vertices"));
        }
        if vertices.iter().any(|v| v.dim() != 2) {
            return Err(Error::validation("vertices", "zigzag tubes are planar"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::validation("radius", "must be positive"));
        }
        let mut min_len = f64::INFINITY;
        for (i, w) in vertices.windows(2).enumerate() {
            let len = w[0].dist(&w[1]);
            if len == 0.0 {
                return Err(Error::validation(
                    format!("vertices[{}]", i + 1),
                    "consecutive vertices coincide",
                ));
            }
            min_len = min_len.min(len);
        }
        if radius > min_len / 10.0 + 1e-15 {
            return Err(Error::validation(
                "radius",
                format!("radius {radius} exceeds 1/10 of the shortest segment ({min_len})"),
            ));
        }
        let mut geo = ZigzagGeometry {
            vertices,
            radius,
            corners: Vec::new(),
        };
        geo.corners = geo.compute_corners();
        Ok(geo)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Distance from `p` to the axis polyline.
    pub fn axis_distance(&self, p: &Point) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| segment_distance(p, &w[0], &w[1]).0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Nearest axis point and the unit direction of its segment.
    fn nearest_axis_point(&self, p: &Point) -> (Point, Point) {
        let mut best = (f64::INFINITY, *p, *p);
        for w in self.vertices.windows(2) {
            let (d, t) = segment_distance(p, &w[0], &w[1]);
            if d < best.0 {
                best = (d, w[0].lerp(&w[1], t), (w[1] - w[0]) * (1.0 / w[0].dist(&w[1])));
            }
        }
        (best.1, best.2)
    }

    fn on_boundary(&self, c: &Point) -> bool {
        self.axis_distance(c) >= self.radius * (1.0 - 1e-10)
    }

    fn offset_segments(&self) -> Vec<(Point, Point)> {
        let mut out = Vec::with_capacity(2 * self.segment_count());
        for w in self.vertices.windows(2) {
            let u = (w[1] - w[0]) * (1.0 / w[0].dist(&w[1]));
            let n = u.perp() * self.radius;
            out.push((w[0] + n, w[1] + n));
            out.push((w[0] - n, w[1] - n));
        }
        out
    }

    fn compute_corners(&self) -> Vec<Point> {
        let segs = self.offset_segments();
        let r = self.radius;
        let mut cands = Vec::new();
        for (a, b) in &segs {
            cands.push(*a);
            cands.push(*b);
        }
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                if let Some(p) = segment_intersection(&segs[i], &segs[j]) {
                    cands.push(p);
                }
            }
            for v in &self.vertices {
                cands.extend(segment_circle(&segs[i], v, r));
            }
        }
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                cands.extend(circle_circle(&self.vertices[i], &self.vertices[j], r));
            }
        }
        let mut out: Vec<Point> = Vec::new();
        for c in cands {
            if self.on_boundary(&c) && !out.iter().any(|q| q.dist(&c) < 1e-12 * (1.0 + r)) {
                out.push(c);
            }
        }
        out
    }

    /// Signed boundary distance: positive inside, `r - dist(p, axis)` outside.
    pub fn signed_distance(&self, p: &Point) -> f64 {
        let r = self.radius;
        let axis = self.axis_distance(p);
        let lower = r - axis;
        if lower <= 0.0 {
            return lower;
        }
        // the point straight out from the nearest axis point realizes `lower`
        // unless another capsule covers it
        let (q, u) = self.nearest_axis_point(p);
        let off = *p - q;
        let dirs = if axis > 0.0 {
            [off * (1.0 / axis), off * (1.0 / axis)]
        } else {
            [u.perp(), -u.perp()]
        };
        for n in dirs {
            if self.on_boundary(&(q + n * r)) {
                return lower;
            }
        }
        let mut cands: Vec<(f64, Point)> = Vec::with_capacity(64);
        for w in self.vertices.windows(2) {
            let len = w[0].dist(&w[1]);
            let u = (w[1] - w[0]) * (1.0 / len);
            let s = (*p - w[0]).dot(&u);
            if (0.0..=len).contains(&s) {
                let n = u.perp();
                let foot = w[0] + u * s;
                for sign in [1.0, -1.0] {
                    let c = foot + n * (sign * r);
                    cands.push((p.dist(&c), c));
                }
            }
        }
        for v in &self.vertices {
            let off = *p - *v;
            let len = off.norm();
            if len > 0.0 {
                let c = *v + off * (r / len);
                cands.push((p.dist(&c), c));
            }
        }
        for c in &self.corners {
            cands.push((p.dist(c), *c));
        }
        cands.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (d, c) in cands {
            if self.on_boundary(&c) {
                return d.max(lower);
            }
        }
        lower
    }
}

fn segment_intersection(s: &(Point, Point), t: &(Point, Point)) -> Option<Point> {
    let r = s.1 - s.0;
    let q = t.1 - t.0;
    let denom = r.cross2(&q);
    if denom.abs() < 1e-300 {
        return None;
    }
    let w = t.0 - s.0;
    let a = w.cross2(&q) / denom;
    let b = w.cross2(&r) / denom;
    if (-1e-12..=1.0 + 1e-12).contains(&a) && (-1e-12..=1.0 + 1e-12).contains(&b) {
        Some(s.0 + r * a)
    } else {
        None
    }
}

fn segment_circle(s: &(Point, Point), c: &Point, r: f64) -> Vec<Point> {
    let d = s.1 - s.0;
    let f = s.0 - *c;
    let a = d.dot(&d);
    let b = 2.0 * f.dot(&d);
    let cc = f.dot(&f) - r * r;
    let disc = b * b - 4.0 * a * cc;
    if disc < 0.0 || a == 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]
        .into_iter()
        .filter(|t| (-1e-12..=1.0 + 1e-12).contains(t))
        .map(|t| s.0 + d * t)
        .collect()
}

fn circle_circle(c1: &Point, c2: &Point, r: f64) -> Vec<Point> {
    let d = c1.dist(c2);
    if d == 0.0 || d > 2.0 * r {
        return Vec::new();
    }
    let mid = c1.midpoint(c2);
    let h = (r * r - d * d / 4.0).max(0.0).sqrt();
    let n = (*c2 - *c1).perp() * (1.0 / d);
    vec![mid + n * h, mid - n * h]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_shape(r: f64) -> ZigzagGeometry {
        ZigzagGeometry::new(
            vec![
                Point::new2(-1.0, 0.0),
                Point::new2(0.0, 0.0),
                Point::new2(0.0, 1.0),
            ],
            r,
        )
        .unwrap()
    }

    #[test]
    fn inner_corner_distance_is_exact() {
        // Inner corner of the L is at (-r, r); a point on the diagonal toward
        // it sees that corner, not the offset lines.
        let r = 0.1;
        let g = l_shape(r);
        let p = Point::new2(-0.03, 0.03);
        let want = p.dist(&Point::new2(-r, r));
        assert!((g.signed_distance(&p) - want).abs() < 1e-14);
        assert!(g.signed_distance(&p) > r - g.axis_distance(&p));
    }

    #[test]
    fn straight_part_matches_offset() {
        let g = l_shape(0.1);
        let p = Point::new2(-0.5, 0.04);
        assert!((g.signed_distance(&p) - 0.06).abs() < 1e-14);
        // outer side of the bend: nearest boundary is the arc around the vertex
        let q = Point::new2(0.02, -0.02);
        let want = 0.1 - q.norm();
        assert!((g.signed_distance(&q) - want).abs() < 1e-14);
    }

    #[test]
    fn radius_limit_enforced() {
        let err = ZigzagGeometry::new(vec![Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)], 0.5);
        assert!(err.is_err());
    }
}
