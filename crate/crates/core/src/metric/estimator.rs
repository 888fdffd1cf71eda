//! Two-sided estimation of the quasihyperbolic distance.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::graph::GridGraph;
use super::path::{segment_qh_lengths, MetricEstimate, Path};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;

pub const DEFAULT_LEVEL: u32 = 4;
pub const DEFAULT_EDGE_TOL: f64 = 1e-6;

const MAX_CACHED_GRAPHS: usize = 24;
const MAX_CACHED_SOURCES: usize = 256;

const UNREACHED: u32 = u32::MAX;
const FROM_SOURCE: u32 = u32::MAX - 1;

/// `log(1 + |x - y| / min(d(x), d(y)))`.
pub fn j_metric(domain: &Domain, x: &Point, y: &Point) -> Result<f64> {
    let dx = domain.dist_to_boundary(x)?;
    let dy = domain.dist_to_boundary(y)?;
    Ok((x.dist(y) / dx.min(dy)).ln_1p())
}

/// The j-metric as a certified lower bound for `k`.
pub fn k_lower(domain: &Domain, x: &Point, y: &Point) -> Result<MetricEstimate> {
    j_metric(domain, x, y).map(MetricEstimate::lower)
}

type GraphSlot = Arc<OnceLock<Arc<GridGraph>>>;
type GraphKey = (u64, u32, u64);
type PointKey = (u64, u32, u64, [u64; 3]);

struct SingleSource {
    dist: Vec<f64>,
    pred: Vec<u32>,
}

/// Shortest route between two query points in a grid graph.
#[derive(Debug, Clone)]
pub struct Route {
    pub value: f64,
    pub hops: usize,
    /// Canonical points from the first query point to the second.
    pub canonical: Vec<Point>,
}

/// Graph-based upper estimator with per-(domain, level, source) caches.
///
/// The caches are keyed by the domain id, so an estimator can be shared
/// across threads and domains.
pub struct Estimator {
    edge_tol: f64,
    graphs: Mutex<HashMap<GraphKey, GraphSlot>>,
    sources: Mutex<HashMap<PointKey, Arc<SingleSource>>>,
    attachments: Mutex<HashMap<PointKey, Arc<Vec<(u32, f64)>>>>,
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::new(DEFAULT_EDGE_TOL)
    }
}

fn bits(p: &Point) -> [u64; 3] {
    let r = p.raw();
    [r[0].to_bits(), r[1].to_bits(), r[2].to_bits()]
}

fn lex(a: &Point, b: &Point) -> Ordering {
    for i in 0..a.dim() {
        match a.get(i).total_cmp(&b.get(i)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

#[derive(PartialEq)]
struct Item(f64, u32);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl Estimator {
    pub fn new(edge_tol: f64) -> Self {
        Estimator {
            edge_tol,
            graphs: Mutex::new(HashMap::new()),
            sources: Mutex::new(HashMap::new()),
            attachments: Mutex::new(HashMap::new()),
        }
    }

    /// Process-wide estimator with the default edge tolerance.
    pub fn shared() -> &'static Estimator {
        static SHARED: OnceLock<Estimator> = OnceLock::new();
        SHARED.get_or_init(Estimator::default)
    }

    pub fn edge_tol(&self) -> f64 {
        self.edge_tol
    }

    /// The grid graph of `domain` at `level`, built once and shared.
    pub fn graph(&self, domain: &Domain, level: u32) -> Arc<GridGraph> {
        let key = (domain.id(), level, self.edge_tol.to_bits());
        let slot = {
            let mut g = self.graphs.lock().expect("graph cache poisoned");
            if g.len() >= MAX_CACHED_GRAPHS && !g.contains_key(&key) {
                g.clear();
            }
            g.entry(key).or_default().clone()
        };
        slot.get_or_init(|| Arc::new(GridGraph::build(domain, level, self.edge_tol)))
            .clone()
    }

    fn attachments(&self, domain: &Domain, graph: &GridGraph, c: &Point) -> Arc<Vec<(u32, f64)>> {
        let key = (domain.id(), graph.level(), self.edge_tol.to_bits(), bits(c));
        if let Some(a) = self.attachments.lock().expect("cache poisoned").get(&key) {
            return a.clone();
        }
        let a = Arc::new(graph.attach(domain, c));
        let mut m = self.attachments.lock().expect("cache poisoned");
        if m.len() >= 16 * MAX_CACHED_SOURCES {
            m.clear();
        }
        m.insert(key, a.clone());
        a
    }

    fn single_source(&self, domain: &Domain, graph: &GridGraph, c: &Point) -> Arc<SingleSource> {
        let key = (domain.id(), graph.level(), self.edge_tol.to_bits(), bits(c));
        if let Some(s) = self.sources.lock().expect("cache poisoned").get(&key) {
            return s.clone();
        }
        let n = graph.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![UNREACHED; n];
        let mut heap = BinaryHeap::new();
        if let Some(i) = graph.node_at(c) {
            dist[i as usize] = 0.0;
            pred[i as usize] = FROM_SOURCE;
            heap.push(Item(0.0, i));
        } else {
            for &(v, w) in self.attachments(domain, graph, c).iter() {
                if w < dist[v as usize] {
                    dist[v as usize] = w;
                    pred[v as usize] = FROM_SOURCE;
                    heap.push(Item(w, v));
                }
            }
        }
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u as usize] {
                continue;
            }
            for &(v, w) in graph.neighbors(u) {
                let nd = d + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    pred[v as usize] = u;
                    heap.push(Item(nd, v));
                }
            }
        }
        let s = Arc::new(SingleSource { dist, pred });
        let mut m = self.sources.lock().expect("cache poisoned");
        if m.len() >= MAX_CACHED_SOURCES {
            m.clear();
        }
        m.insert(key, s.clone());
        s
    }

    fn trace(graph: &GridGraph, src: &SingleSource, mut v: u32) -> Vec<Point> {
        let mut out = vec![graph.node(v)];
        while src.pred[v as usize] != FROM_SOURCE {
            v = src.pred[v as usize];
            out.push(graph.node(v));
        }
        out.reverse();
        out
    }

    /// Shortest route between canonical points `a` and `b`; `None` when they
    /// are not connected at this level.
    pub fn route(&self, domain: &Domain, level: u32, a: &Point, b: &Point) -> Option<Route> {
        if a == b {
            return Some(Route {
                value: 0.0,
                hops: 0,
                canonical: vec![*a],
            });
        }
        let swapped = lex(a, b) == Ordering::Greater;
        let (x, y) = if swapped { (b, a) } else { (a, b) };
        let graph = self.graph(domain, level);
        let src = self.single_source(domain, &graph, x);
        let x_node = graph.node_at(x);
        let y_node = graph.node_at(y);

        let mut best: Option<Route> = graph.direct(domain, x, y).map(|w| Route {
            value: w,
            hops: 1,
            canonical: vec![*x, *y],
        });
        let mut consider = |value: f64, last: u32, extra: usize| {
            if !value.is_finite() || best.as_ref().is_some_and(|r| r.value <= value) {
                return;
            }
            let mut pts = Estimator::trace(&graph, &src, last);
            if x_node.is_none() {
                pts.insert(0, *x);
            }
            if extra == 1 {
                pts.push(*y);
            }
            let hops = pts.len() - 1;
            best = Some(Route {
                value,
                hops,
                canonical: pts,
            });
        };
        if let Some(yn) = y_node {
            consider(src.dist[yn as usize], yn, 0);
        } else {
            for &(v, w) in self.attachments(domain, &graph, y).iter() {
                consider(src.dist[v as usize] + w, v, 1);
            }
        }
        let mut r = best?;
        if swapped {
            r.canonical.reverse();
        }
        Some(r)
    }

    pub fn k_upper(&self, domain: &Domain, x: &Point, y: &Point, level: u32) -> Result<MetricEstimate> {
        let (cx, cy) = self.canonical_pair(domain, x, y)?;
        let r = self
            .route(domain, level, &cx, &cy)
            .ok_or_else(|| disconnected(domain, x, y, level))?;
        Ok(MetricEstimate::upper(r.value, r.hops as f64 * self.edge_tol))
    }

    /// `k_upper` at levels `first, first + 1, ...`; `None` marks a level at
    /// which the points are not connected yet.
    pub fn refine_k(
        &self,
        domain: &Domain,
        x: &Point,
        y: &Point,
        first: u32,
        levels: u32,
    ) -> Result<Vec<(u32, Option<MetricEstimate>)>> {
        if levels < 2 {
            return Err(Error::validation("levels", "need at least two levels"));
        }
        let mut out = Vec::new();
        for level in first..first + levels {
            match self.k_upper(domain, x, y, level) {
                Ok(e) => out.push((level, Some(e))),
                Err(Error::Resolution { .. }) => out.push((level, None)),
                Err(e) => return Err(e),
            }
        }
        if out.iter().all(|(_, e)| e.is_none()) {
            return Err(disconnected(domain, x, y, first + levels - 1));
        }
        Ok(out)
    }

    /// The polyline realizing `k_upper`, with endpoints exactly `x` and `y`.
    pub fn extract_neargeodesic(&self, domain: &Domain, x: &Point, y: &Point, level: u32) -> Result<Path> {
        if x == y {
            return Err(Error::validation("y", "endpoints coincide; a path needs two distinct points"));
        }
        let (cx, cy) = self.canonical_pair(domain, x, y)?;
        let r = self
            .route(domain, level, &cx, &cy)
            .ok_or_else(|| disconnected(domain, x, y, level))?;
        let n = r.canonical.len();
        let mut pts: Vec<Point> = r.canonical.iter().map(|c| domain.to_world(c)).collect();
        pts[0] = *x;
        pts[n - 1] = *y;
        Ok(Path::trusted(pts))
    }

    /// Largest ratio `ℓ_k(path[u, v]) / max(j(u, v), k_upper(u, v))` over
    /// vertex pairs of `path` (all pairs, or a seeded sample of
    /// `sample_pairs` of them).
    pub fn neargeodesic_constant(
        &self,
        path: &Path,
        domain: &Domain,
        sample_pairs: usize,
        level: u32,
    ) -> Result<f64> {
        if sample_pairs == 0 {
            return Err(Error::validation("sample_pairs", "must be at least 1"));
        }
        let pts = path.points();
        let seg = segment_qh_lengths(path, domain, self.edge_tol)?;
        let mut prefix = vec![0.0];
        for s in &seg {
            prefix.push(prefix.last().unwrap() + s);
        }
        let n = pts.len();
        let total = n * (n - 1) / 2;
        let pairs: Vec<(usize, usize)> = if total <= sample_pairs {
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let mut picked: Vec<usize> = sample(&mut rng, total, sample_pairs).into_vec();
            picked.sort_unstable();
            let mut all = Vec::with_capacity(sample_pairs);
            let (mut idx, mut k) = (0usize, 0usize);
            'outer: for u in 0..n {
                for v in u + 1..n {
                    if idx < picked.len() && picked[idx] == k {
                        all.push((u, v));
                        idx += 1;
                        if idx == picked.len() {
                            break 'outer;
                        }
                    }
                    k += 1;
                }
            }
            all
        };
        let mut worst: f64 = 0.0;
        for (u, v) in pairs {
            if pts[u] == pts[v] {
                continue;
            }
            let len = prefix[v] - prefix[u];
            let j = j_metric(domain, &pts[u], &pts[v])?;
            let k = self.k_upper(domain, &pts[u], &pts[v], level)?.value;
            let den = j.max(k);
            if den > 0.0 {
                worst = worst.max(len / den);
            }
        }
        Ok(worst)
    }

    fn canonical_pair(&self, domain: &Domain, x: &Point, y: &Point) -> Result<(Point, Point)> {
        for p in [x, y] {
            if !domain.contains(p) {
                return Err(domain.outside(p));
            }
        }
        Ok((domain.to_canonical(x), domain.to_canonical(y)))
    }
}

fn disconnected(domain: &Domain, x: &Point, y: &Point, level: u32) -> Error {
    Error::resolution(
        level,
        format!(
            "{x} and {y} are not connected in the grid of `{}`; try a finer level",
            domain.name()
        ),
    )
}

pub fn k_upper(domain: &Domain, x: &Point, y: &Point, level: u32) -> Result<MetricEstimate> {
    Estimator::shared().k_upper(domain, x, y, level)
}

pub fn refine_k(
    domain: &Domain,
    x: &Point,
    y: &Point,
    first: u32,
    levels: u32,
) -> Result<Vec<(u32, Option<MetricEstimate>)>> {
    Estimator::shared().refine_k(domain, x, y, first, levels)
}

pub fn extract_neargeodesic(domain: &Domain, x: &Point, y: &Point, level: u32) -> Result<Path> {
    Estimator::shared().extract_neargeodesic(domain, x, y, level)
}

pub fn neargeodesic_constant(path: &Path, domain: &Domain, sample_pairs: usize, level: u32) -> Result<f64> {
    Estimator::shared().neargeodesic_constant(path, domain, sample_pairs, level)
}
