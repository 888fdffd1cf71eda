//! Boundary-graded grid graphs in canonical coordinates.
//!
//! Level `L` has base pitch `h_L = grid_scale / 2^L`. A lattice point `p` of
//! pitch `h_l / 2^j` belongs to the node set `V_l` when `d(p) < 4 h_l / 2^j`
//! (or `j = 0`), so near the boundary the pitch drops to `h_l / 8`. Node sets
//! are nested in `l`. The graph at level `L` carries every edge of every level
//! `l <= L`, which makes the shortest-path value non-increasing in `L`.
//!
//! Coordinates are integer multiples of `u_L = h_L / 8`; since the levels
//! differ by powers of two, the same point has bit-identical coordinates at
//! every level.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::quad::integrate_segment;
use crate::domain::Domain;
use crate::geom::Point;

/// Connection radius in units of the local pitch.
pub const CONNECTION_FACTOR: f64 = 2.5;
/// Number of halvings of the pitch inside the boundary band.
const BAND_DEPTH: u32 = 3;

type Key = [i64; 3];

#[derive(Debug)]
pub struct GridGraph {
    level: u32,
    dim: usize,
    h: f64,
    unit: f64,
    edge_tol: f64,
    nodes: Vec<Point>,
    keys: Vec<Key>,
    depth: Vec<f64>,
    index: HashMap<Key, u32>,
    offsets: Vec<usize>,
    adj: Vec<(u32, f64)>,
}

fn offsets(dim: usize) -> Vec<Key> {
    let mut out = Vec::new();
    let r = 2i64;
    let zr = if dim == 3 { r } else { 0 };
    for i in -r..=r {
        for j in -r..=r {
            for k in -zr..=zr {
                let n2 = (i * i + j * j + k * k) as f64;
                if n2 > 0.0 && n2 <= CONNECTION_FACTOR * CONNECTION_FACTOR {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

fn trailing(key: &Key, dim: usize) -> u32 {
    key[..dim]
        .iter()
        .map(|&k| if k == 0 { u32::MAX } else { k.trailing_zeros() })
        .min()
        .unwrap_or(u32::MAX)
}

impl GridGraph {
    pub fn build(domain: &Domain, level: u32, edge_tol: f64) -> GridGraph {
        let dim = domain.dim();
        let h = domain.grid_scale() / f64::powi(2.0, level as i32);
        let unit = h / 8.0;
        let (lo, hi) = domain.canonical_bbox();
        let mut g = GridGraph {
            level,
            dim,
            h,
            unit,
            edge_tol,
            nodes: Vec::new(),
            keys: Vec::new(),
            depth: Vec::new(),
            index: HashMap::new(),
            offsets: Vec::new(),
            adj: Vec::new(),
        };
        g.generate_nodes(domain, &lo, &hi);
        g.connect(domain);
        g
    }

    fn generate_nodes(&mut self, domain: &Domain, lo: &Point, hi: &Point) {
        let dim = self.dim;
        let h = self.h;
        let mut range = [(0i64, 0i64); 3];
        for (i, r) in range.iter_mut().enumerate().take(dim) {
            *r = ((lo.get(i) / h).floor() as i64, (hi.get(i) / h).ceil() as i64);
        }
        let half_diag = 0.5 * h * (dim as f64).sqrt();
        let band = 4.0 * h / 2.0;
        let sub = 1i64 << BAND_DEPTH;
        let within = |p: &Point| (0..dim).all(|i| p.get(i) >= lo.get(i) && p.get(i) <= hi.get(i));
        let zr = if dim == 3 { range[2] } else { (0, 0) };
        let cells: Vec<Key> = (range[0].0..=range[0].1)
            .flat_map(|a| (range[1].0..=range[1].1).map(move |b| (a, b)))
            .flat_map(|(a, b)| (zr.0..=zr.1).map(move |c| [a, b, c]))
            .collect();
        let found: Vec<Vec<(Key, Point, f64)>> = cells
            .par_iter()
            .map(|cell| {
                let mut out = Vec::new();
                let corner = self.point_of(&[cell[0] * sub, cell[1] * sub, cell[2] * sub]);
                let mut center = corner;
                for i in 0..dim {
                    center = center.with(i, corner.get(i) + 0.5 * h);
                }
                let near = domain.boundary_distance_canonical(&center) - half_diag < band;
                let zs = if dim == 3 { sub } else { 1 };
                for a in 0..sub {
                    for b in 0..sub {
                        for c in 0..zs {
                            let fine = a != 0 || b != 0 || c != 0;
                            if fine && !near {
                                continue;
                            }
                            let key = [cell[0] * sub + a, cell[1] * sub + b, cell[2] * sub + c];
                            let p = self.point_of(&key);
                            if !within(&p) {
                                continue;
                            }
                            let Some(d) = domain.interior_distance_canonical(&p) else { continue };
                            // too close to the boundary to help any path
                            if d < 0.25 * self.unit {
                                continue;
                            }
                            let j0 = BAND_DEPTH.saturating_sub(trailing(&[a, b, c], dim));
                            if j0 <= self.class_at(d, self.level) {
                                out.push((key, p, d));
                            }
                        }
                    }
                }
                out
            })
            .collect();
        for (key, p, d) in found.into_iter().flatten() {
            self.index.insert(key, self.nodes.len() as u32);
            self.keys.push(key);
            self.nodes.push(p);
            self.depth.push(d);
        }
    }

    fn connect(&mut self, domain: &Domain) {
        let offs = offsets(self.dim);
        let mut cand: Vec<(u32, u32)> = (0..self.nodes.len())
            .into_par_iter()
            .flat_map_iter(|p| {
                let mut out = Vec::new();
                for ell in 0..=self.level {
                    let Some(cp) = self.class_of(p, ell) else { continue };
                    let step = self.step(ell, cp);
                    let kp = self.keys[p];
                    for o in &offs {
                        let kq = [kp[0] + o[0] * step, kp[1] + o[1] * step, kp[2] + o[2] * step];
                        let Some(&q) = self.index.get(&kq) else { continue };
                        let Some(cq) = self.class_of(q as usize, ell) else { continue };
                        if cq > cp || (cq == cp && (q as usize) < p) {
                            continue;
                        }
                        out.push(((p as u32).min(q), (p as u32).max(q)));
                    }
                }
                out
            })
            .collect();
        cand.par_sort_unstable();
        cand.dedup();
        let weights: Vec<Option<f64>> = cand
            .par_iter()
            .map(|&(a, b)| {
                let (pa, pb) = (&self.nodes[a as usize], &self.nodes[b as usize]);
                if !domain.segment_inside_canonical(pa, pb) {
                    return None;
                }
                integrate_segment(domain, pa, pb, self.edge_tol).ok().map(|q| q.value)
            })
            .collect();
        let n = self.nodes.len();
        let mut deg = vec![0usize; n + 1];
        for (&(a, b), w) in cand.iter().zip(&weights) {
            if w.is_some() {
                deg[a as usize + 1] += 1;
                deg[b as usize + 1] += 1;
            }
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut fill = deg.clone();
        let mut adj = vec![(0u32, 0.0f64); deg[n]];
        for (&(a, b), w) in cand.iter().zip(&weights) {
            if let Some(w) = *w {
                adj[fill[a as usize]] = (b, w);
                fill[a as usize] += 1;
                adj[fill[b as usize]] = (a, w);
                fill[b as usize] += 1;
            }
        }
        self.offsets = deg;
        self.adj = adj;
    }

    fn point_of(&self, key: &Key) -> Point {
        let mut p = Point::origin(self.dim);
        for i in 0..self.dim {
            p = p.with(i, key[i] as f64 * self.unit);
        }
        p
    }

    /// Base pitch of level `ell`.
    fn pitch(&self, ell: u32) -> f64 {
        self.h * f64::powi(2.0, (self.level - ell) as i32)
    }

    /// Number of band halvings that apply at depth `d` on level `ell`.
    fn class_at(&self, d: f64, ell: u32) -> u32 {
        let h = self.pitch(ell);
        (1..=BAND_DEPTH)
            .filter(|&j| d < 4.0 * h / f64::powi(2.0, j as i32))
            .count() as u32
    }

    fn local_pitch(&self, d: f64, ell: u32) -> f64 {
        self.pitch(ell) / f64::powi(2.0, self.class_at(d, ell) as i32)
    }

    /// Lattice step, in key units, of pitch `h_ell / 2^class`.
    fn step(&self, ell: u32, class: u32) -> i64 {
        1i64 << (BAND_DEPTH + self.level - ell - class)
    }

    /// Band class of node `i` on level `ell`, or `None` if it is not in `V_ell`.
    fn class_of(&self, i: usize, ell: u32) -> Option<u32> {
        let tz = trailing(&self.keys[i], self.dim);
        let need = (BAND_DEPTH + self.level - ell) as i64 - tz.min(64) as i64;
        let c = self.class_at(self.depth[i], ell);
        (need <= c as i64).then_some(c)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn edge_tol(&self) -> f64 {
        self.edge_tol
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn node(&self, i: u32) -> Point {
        self.nodes[i as usize]
    }

    pub fn neighbors(&self, i: u32) -> &[(u32, f64)] {
        &self.adj[self.offsets[i as usize]..self.offsets[i as usize + 1]]
    }

    /// Node sitting exactly at canonical point `c`, if any.
    pub fn node_at(&self, c: &Point) -> Option<u32> {
        let mut key = [0i64; 3];
        for (i, k) in key.iter_mut().enumerate().take(self.dim) {
            let v = c.get(i) / self.unit;
            if v.fract() != 0.0 || v.abs() > 1e15 {
                return None;
            }
            *k = v as i64;
        }
        let i = *self.index.get(&key)?;
        (self.nodes[i as usize] == *c).then_some(i)
    }

    /// Certified, weighted connections from a canonical query point to the
    /// graph, using the same radius rule as the node-to-node edges.
    pub fn attach(&self, domain: &Domain, x: &Point) -> Vec<(u32, f64)> {
        let dx = domain.signed_canonical(x);
        let mut cand = BTreeSet::new();
        for ell in 0..=self.level {
            let rho_x = self.local_pitch(dx, ell);
            for j in 0..=BAND_DEPTH {
                let pitch = self.pitch(ell) / f64::powi(2.0, j as i32);
                let s = self.step(ell, j);
                let r = CONNECTION_FACTOR * rho_x.min(pitch);
                let span = s as f64 * self.unit;
                let mut rng = [(0i64, 0i64); 3];
                for (i, q) in rng.iter_mut().enumerate().take(self.dim) {
                    *q = (
                        ((x.get(i) - r) / span).ceil() as i64,
                        ((x.get(i) + r) / span).floor() as i64,
                    );
                }
                for a in rng[0].0..=rng[0].1 {
                    for b in rng[1].0..=rng[1].1 {
                        for c in rng[2].0..=rng[2].1 {
                            let Some(&q) = self.index.get(&[a * s, b * s, c * s]) else {
                                continue;
                            };
                            let Some(cq) = self.class_of(q as usize, ell) else { continue };
                            let rho_q = self.pitch(ell) / f64::powi(2.0, cq as i32);
                            if self.nodes[q as usize].dist(x) <= CONNECTION_FACTOR * rho_x.min(rho_q) {
                                cand.insert(q);
                            }
                        }
                    }
                }
            }
        }
        cand.into_iter()
            .filter_map(|q| {
                let p = &self.nodes[q as usize];
                if p == x || !domain.segment_inside_canonical(x, p) {
                    return None;
                }
                integrate_segment(domain, x, p, self.edge_tol)
                    .ok()
                    .map(|w| (q, w.value))
            })
            .collect()
    }

    /// Weight of the direct edge between two query points, if the radius rule
    /// admits it on some level and the segment is certified.
    pub fn direct(&self, domain: &Domain, x: &Point, y: &Point) -> Option<f64> {
        let (dx, dy) = (domain.signed_canonical(x), domain.signed_canonical(y));
        let r = CONNECTION_FACTOR * self.local_pitch(dx, 0).min(self.local_pitch(dy, 0));
        if x.dist(y) > r || !domain.segment_inside_canonical(x, y) {
            return None;
        }
        integrate_segment(domain, x, y, self.edge_tol).ok().map(|q| q.value)
    }
}
