//! The image `f(B)` of a planar disc under a map, used as a domain in its own
//! right. Membership goes through the inverse map; the boundary distance is
//! measured against a densely refined polyline of `f(∂B)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{segment_distance, Point};
use crate::maps::PointMap;

const INITIAL_SAMPLES: usize = 256;
const MAX_SAMPLES: usize = 1 << 15;
const GRID_CELLS: usize = 64;

pub struct ImageSet {
    map: Arc<dyn PointMap>,
    center: Point,
    radius: f64,
    boundary: Vec<Point>,
    index: SegmentIndex,
}

impl std::fmt::Debug for ImageSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageSet")
            .field("map", &self.map.name())
            .field("center", &self.center)
            .field("radius", &self.radius)
            .field("boundary_len", &self.boundary.len())
            .finish()
    }
}

impl ImageSet {
    /// `f(B(center, radius))`. `chord_tol` bounds the deviation of the
    /// boundary polyline from the true image curve, relative to the disc radius.
    pub fn new(map: Arc<dyn PointMap>, center: Point, radius: f64, chord_tol: f64) -> Result<Self> {
        if center.dim() != 2 {
            return Err(Error::validation(
                "center",
                "image domains are only supported in the plane",
            ));
        }
        if !(radius > 0.0) {
            return Err(Error::validation("radius", "must be positive"));
        }
        let tol = chord_tol * radius;
        let at = |theta: f64| {
            let (s, c) = theta.sin_cos();
            map.forward(&(center + Point::new2(c, s) * radius))
        };
        let mut thetas: Vec<f64> = (0..=INITIAL_SAMPLES)
            .map(|k| std::f64::consts::TAU * k as f64 / INITIAL_SAMPLES as f64)
            .collect();
        let mut pts: Vec<Point> = thetas.iter().map(|&t| at(t)).collect();
        loop {
            let mut next_t = Vec::with_capacity(thetas.len() * 2);
            let mut next_p = Vec::with_capacity(thetas.len() * 2);
            let mut refined = false;
            for i in 0..thetas.len() - 1 {
                next_t.push(thetas[i]);
                next_p.push(pts[i]);
                let tm = 0.5 * (thetas[i] + thetas[i + 1]);
                let pm = at(tm);
                let chord_mid = pts[i].midpoint(&pts[i + 1]);
                if pm.dist(&chord_mid) > tol && thetas.len() < MAX_SAMPLES {
                    next_t.push(tm);
                    next_p.push(pm);
                    refined = true;
                }
            }
            next_t.push(*thetas.last().unwrap());
            next_p.push(*pts.last().unwrap());
            thetas = next_t;
            pts = next_p;
            if !refined {
                break;
            }
        }
        let index = SegmentIndex::new(&pts);
        Ok(ImageSet {
            map,
            center,
            radius,
            boundary: pts,
            index,
        })
    }

    pub fn map_name(&self) -> String {
        self.map.name()
    }

    pub fn source_center(&self) -> Point {
        self.center
    }

    pub fn source_radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.map.inverse(p).dist(&self.center) < self.radius
    }

    pub fn signed_distance(&self, p: &Point) -> f64 {
        let d = self.index.nearest(p, &self.boundary);
        if self.contains(p) {
            d
        } else {
            -d
        }
    }

    pub fn bbox(&self) -> (Point, Point) {
        (self.index.lo, self.index.hi)
    }
}

/// Uniform bucket grid over the polyline segments.
struct SegmentIndex {
    lo: Point,
    hi: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentIndex {
    fn new(pts: &[Point]) -> Self {
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in pts {
            for i in 0..2 {
                lo = lo.with(i, lo.get(i).min(p.get(i)));
                hi = hi.with(i, hi.get(i).max(p.get(i)));
            }
        }
        let extent = (hi.get(0) - lo.get(0)).max(hi.get(1) - lo.get(1)).max(1e-300);
        let cell = extent / GRID_CELLS as f64;
        let nx = ((hi.get(0) - lo.get(0)) / cell).floor() as usize + 1;
        let ny = ((hi.get(1) - lo.get(1)) / cell).floor() as usize + 1;
        let mut idx = SegmentIndex {
            lo,
            hi,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (k, w) in pts.windows(2).enumerate() {
            let (i0, j0) = idx.cell_of(&w[0]);
            let (i1, j1) = idx.cell_of(&w[1]);
            for i in i0.min(i1)..=i0.max(i1) {
                for j in j0.min(j1)..=j0.max(j1) {
                    idx.buckets[j * nx + i].push(k as u32);
                }
            }
        }
        idx
    }

    fn cell_of(&self, p: &Point) -> (usize, usize) {
        let fx = ((p.get(0) - self.lo.get(0)) / self.cell).floor();
        let fy = ((p.get(1) - self.lo.get(1)) / self.cell).floor();
        (
            (fx.max(0.0) as usize).min(self.nx - 1),
            (fy.max(0.0) as usize).min(self.ny - 1),
        )
    }

    fn nearest(&self, p: &Point, pts: &[Point]) -> f64 {
        let (ci, cj) = self.cell_of(p);
        let mut best = f64::INFINITY;
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            if ring >= 1 && (ring as f64 - 1.0) * self.cell > best {
                break;
            }
            let (ci, cj, ring) = (ci as isize, cj as isize, ring as isize);
            for j in cj - ring..=cj + ring {
                for i in ci - ring..=ci + ring {
                    if (i - ci).abs() != ring && (j - cj).abs() != ring {
                        continue;
                    }
                    if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
                        continue;
                    }
                    for &k in &self.buckets[j as usize * self.nx + i as usize] {
                        let k = k as usize;
                        best = best.min(segment_distance(p, &pts[k], &pts[k + 1]).0);
                    }
                }
            }
        }
        best
    }
}
