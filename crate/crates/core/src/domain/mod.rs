//! Concrete domains with exact boundary distances.
//!
//! Every domain is a canonical shape placed in the world by a similarity
//! frame. Distances, containment and the grid used by the metric estimators
//! are all evaluated in canonical coordinates, so a domain and its image under
//! a similarity share one grid up to the frame.

mod image;
mod spec;
mod zigzag;

use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use image::ImageSet;
pub use spec::{DomainSpec, ShapeSpec};
pub(crate) use spec::Fields;
pub use zigzag::ZigzagGeometry;

use crate::error::{Error, Result};
use crate::geom::{segment_distance, Point, Similarity};

/// Bisection depth after which `segment_inside` gives up and answers `false`.
pub const SEGMENT_RECURSION_CAP: u32 = 40;

const SAMPLING_ATTEMPTS_PER_POINT: usize = 10_000;

#[derive(Debug, Clone)]
pub(crate) enum Shape {
    /// Unit ball at the origin.
    Ball { dim: usize },
    /// Unit ball minus one interior point.
    PuncturedBall { dim: usize, puncture: Point },
    /// Unit disk minus the slit `[0, 1) × {0}`.
    SlitDisk,
    /// `{x : x_last > 0}`.
    HalfPlane { dim: usize },
    /// Union of open balls of radius `radius` centred on `[0, length] e_1`.
    StraightTube { dim: usize, length: f64, radius: f64 },
    Zigzag(Arc<ZigzagGeometry>),
    Image(Arc<ImageSet>),
}

/// Kind tag of a domain, as used in spec documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Ball,
    PuncturedBall,
    SlitDisk,
    HalfPlane,
    StraightTube,
    ZigzagTube,
    Image,
}

impl DomainKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DomainKind::Ball => "ball",
            DomainKind::PuncturedBall => "punctured_ball",
            DomainKind::SlitDisk => "slit_disk",
            DomainKind::HalfPlane => "half_plane",
            DomainKind::StraightTube => "straight_tube",
            DomainKind::ZigzagTube => "zigzag_tube",
            DomainKind::Image => "image",
        }
    }
}

/// A connected open subset of `R^2` or `R^3`.
#[derive(Debug, Clone)]
pub struct Domain {
    name: String,
    shape: Shape,
    frame: Similarity,
    id: u64,
}

impl Domain {
    fn build(name: Option<String>, shape: Shape, frame: Similarity) -> Self {
        let kind = shape_kind(&shape);
        let mut d = Domain {
            name: name.unwrap_or_else(|| kind.as_str().to_string()),
            shape,
            frame,
            id: 0,
        };
        d.id = d.compute_id();
        d
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        let frame = Similarity::new(radius, crate::geom::identity3(), center)
            .map_err(|_| Error::validation("radius", "must be positive"))?;
        Ok(Domain::build(
            None,
            Shape::Ball { dim: center.dim() },
            frame,
        ))
    }

    pub fn punctured_ball(center: Point, radius: f64, puncture: Point) -> Result<Self> {
        let frame = Similarity::new(radius, crate::geom::identity3(), center)
            .map_err(|_| Error::validation("radius", "must be positive"))?;
        if puncture.dim() != center.dim() {
            return Err(Error::validation("puncture", "dimension mismatch"));
        }
        let q = frame.invert(&puncture);
        if q.norm() >= 1.0 {
            return Err(Error::validation(
                "puncture",
                "must lie strictly inside the ball",
            ));
        }
        Ok(Domain::build(
            None,
            Shape::PuncturedBall {
                dim: center.dim(),
                puncture: q,
            },
            frame,
        ))
    }

    /// Unit disk minus `[0, 1) × {0}`.
    pub fn slit_disk() -> Self {
        Domain::build(None, Shape::SlitDisk, Similarity::identity(2))
    }

    /// Upper half-space `{x_last > 0}`.
    pub fn half_plane(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Domain::build(
            None,
            Shape::HalfPlane { dim },
            Similarity::identity(dim),
        ))
    }

    /// Tube of radius `radius` around the segment `[0, length] e_1`.
    pub fn straight_tube(dim: usize, length: f64, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::validation("length", "must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::validation("radius", "must be positive"));
        }
        Ok(Domain::build(
            None,
            Shape::StraightTube {
                dim,
                length,
                radius,
            },
            Similarity::identity(dim),
        ))
    }

    pub fn zigzag_tube(vertices: Vec<Point>, radius: f64) -> Result<Self> {
        let geo = ZigzagGeometry::new(vertices, radius)?;
        Ok(Domain::build(
            None,
            Shape::Zigzag(Arc::new(geo)),
            Similarity::identity(2),
        ))
    }

    pub fn image(set: ImageSet) -> Self {
        Domain::build(None, Shape::Image(Arc::new(set)), Similarity::identity(2))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The same shape placed by `outer ∘ frame`.
    pub fn transformed(&self, outer: &Similarity) -> Self {
        let mut d = Domain::build(
            Some(self.name.clone()),
            self.shape.clone(),
            outer.compose(&self.frame),
        );
        d.name = self.name.clone();
        d
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> DomainKind {
        shape_kind(&self.shape)
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Ball { dim }
            | Shape::PuncturedBall { dim, .. }
            | Shape::HalfPlane { dim }
            | Shape::StraightTube { dim, .. } => *dim,
            Shape::SlitDisk | Shape::Zigzag(_) | Shape::Image(_) => 2,
        }
    }

    /// Stable identity of the shape and frame, used as a cache key.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn frame(&self) -> &Similarity {
        &self.frame
    }

    pub(crate) fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn zigzag(&self) -> Option<&ZigzagGeometry> {
        match &self.shape {
            Shape::Zigzag(z) => Some(z),
            _ => None,
        }
    }

    pub fn to_canonical(&self, p: &Point) -> Point {
        self.frame.invert(p)
    }

    pub fn to_world(&self, c: &Point) -> Point {
        self.frame.apply(c)
    }

    /// Signed boundary distance in canonical units: positive inside, zero on
    /// the boundary (including the slit and the puncture), negative outside.
    pub(crate) fn signed_canonical(&self, c: &Point) -> f64 {
        match &self.shape {
            Shape::Ball { .. } => 1.0 - c.norm(),
            Shape::PuncturedBall { puncture, .. } => {
                let s = 1.0 - c.norm();
                if s <= 0.0 {
                    s
                } else {
                    s.min(c.dist(puncture))
                }
            }
            Shape::SlitDisk => {
                let s = 1.0 - c.norm();
                if s <= 0.0 {
                    s
                } else {
                    let slit = segment_distance(c, &Point::new2(0.0, 0.0), &Point::new2(1.0, 0.0)).0;
                    s.min(slit)
                }
            }
            Shape::HalfPlane { dim } => c.get(dim - 1),
            Shape::StraightTube { dim, length, radius } => {
                let a = Point::origin(*dim);
                let b = Point::unit(*dim, 0) * *length;
                radius - segment_distance(c, &a, &b).0
            }
            Shape::Zigzag(z) => z.signed_distance(c),
            Shape::Image(im) => im.signed_distance(c),
        }
    }

    /// Unsigned distance to the boundary, defined everywhere (canonical units).
    pub(crate) fn boundary_distance_canonical(&self, c: &Point) -> f64 {
        self.signed_canonical(c).abs()
    }

    /// Boundary distance of an interior canonical point, `None` outside.
    pub(crate) fn interior_distance_canonical(&self, c: &Point) -> Option<f64> {
        if !c.is_finite() {
            return None;
        }
        if let Shape::Image(im) = &self.shape {
            if !im.contains(c) {
                return None;
            }
        }
        let d = self.signed_canonical(c);
        (d > 0.0).then_some(d)
    }

    pub(crate) fn contains_canonical(&self, c: &Point) -> bool {
        if !c.is_finite() {
            return false;
        }
        match &self.shape {
            Shape::Image(im) => im.contains(c),
            _ => self.signed_canonical(c) > 0.0,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim() && self.contains_canonical(&self.to_canonical(p))
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn dist_to_boundary(&self, p: &Point) -> Result<f64> {
        if p.dim() != self.dim() {
            return Err(Error::validation(
                "point",
                format!("expected dimension {}, got {}", self.dim(), p.dim()),
            ));
        }
        let c = self.to_canonical(p);
        if !self.contains_canonical(&c) {
            return Err(self.outside(p));
        }
        Ok(self.frame.scale * self.signed_canonical(&c).max(0.0))
    }

    pub(crate) fn outside(&self, p: &Point) -> Error {
        Error::OutsideDomain {
            domain: self.name.clone(),
            point: p.to_string(),
        }
    }

    /// Certified test that the closed segment `[a, b]` lies in the domain.
    ///
    /// Covers the segment by the balls `B(a, d(a))` and `B(b, d(b))` and
    /// bisects where they fail to overlap. A `true` answer is a proof (up to
    /// floating point); a `false` may be conservative.
    pub fn segment_inside(&self, a: &Point, b: &Point) -> bool {
        let (ca, cb) = (self.to_canonical(a), self.to_canonical(b));
        self.segment_inside_canonical(&ca, &cb)
    }

    pub(crate) fn segment_inside_canonical(&self, a: &Point, b: &Point) -> bool {
        let (Some(da), Some(db)) = (self.interior_distance_canonical(a), self.interior_distance_canonical(b)) else {
            return false;
        };
        self.cover(a, da, b, db, 0)
    }

    fn cover(&self, a: &Point, da: f64, b: &Point, db: f64, depth: u32) -> bool {
        if da + db > a.dist(b) {
            return true;
        }
        if depth >= SEGMENT_RECURSION_CAP {
            return false;
        }
        let m = a.midpoint(b);
        let Some(dm) = self.interior_distance_canonical(&m) else { return false };
        self.cover(a, da, &m, dm, depth + 1) && self.cover(&m, dm, b, db, depth + 1)
    }

    /// Axis-aligned canonical box enclosing the domain (a finite window for
    /// the half-plane).
    pub(crate) fn canonical_bbox(&self) -> (Point, Point) {
        match &self.shape {
            Shape::Ball { dim } | Shape::PuncturedBall { dim, .. } => {
                (Point::origin(*dim) - ones(*dim), ones(*dim))
            }
            Shape::SlitDisk => (Point::new2(-1.0, -1.0), Point::new2(1.0, 1.0)),
            Shape::HalfPlane { dim } => {
                let lo = ones(*dim) * -2.0;
                let hi = ones(*dim) * 2.0;
                (lo.with(dim - 1, 0.0), hi.with(dim - 1, 4.0))
            }
            Shape::StraightTube { dim, length, radius } => {
                let lo = ones(*dim) * -radius;
                let hi = (ones(*dim) * *radius).with(0, length + radius);
                (lo, hi)
            }
            Shape::Zigzag(z) => {
                let r = z.radius();
                let mut lo = z.vertices()[0];
                let mut hi = lo;
                for v in z.vertices() {
                    for i in 0..2 {
                        lo = lo.with(i, lo.get(i).min(v.get(i)));
                        hi = hi.with(i, hi.get(i).max(v.get(i)));
                    }
                }
                (lo - ones(2) * r, hi + ones(2) * r)
            }
            Shape::Image(im) => im.bbox(),
        }
    }

    /// Canonical box used for rejection sampling.
    pub(crate) fn sampling_box(&self) -> (Point, Point) {
        match &self.shape {
            Shape::HalfPlane { dim } => {
                let lo = ones(*dim) * -1.0;
                (lo.with(dim - 1, 0.0), ones(*dim).with(dim - 1, 2.0))
            }
            _ => self.canonical_bbox(),
        }
    }

    /// Coarsest grid pitch (level 0), canonical units.
    pub(crate) fn grid_scale(&self) -> f64 {
        match &self.shape {
            Shape::Ball { .. }
            | Shape::PuncturedBall { .. }
            | Shape::SlitDisk
            | Shape::HalfPlane { .. } => 1.0,
            Shape::StraightTube { radius, .. } => 8.0 * radius,
            Shape::Zigzag(z) => 8.0 * z.radius(),
            Shape::Image(_) => {
                let (lo, hi) = self.canonical_bbox();
                0.5 * (hi.get(0) - lo.get(0)).max(hi.get(1) - lo.get(1))
            }
        }
    }

    /// `n` seeded interior points with boundary distance at least `margin`.
    pub fn sample_interior(&self, n: usize, margin: f64, seed: u64) -> Result<Vec<Point>> {
        if n == 0 {
            return Err(Error::validation("n", "must be at least 1"));
        }
        if !(margin >= 0.0) {
            return Err(Error::validation("margin", "must be non-negative"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = self.sampling_box();
        let dim = self.dim();
        let budget = SAMPLING_ATTEMPTS_PER_POINT * n;
        let mut out = Vec::with_capacity(n);
        for _ in 0..budget {
            let mut c = Point::origin(dim);
            for i in 0..dim {
                c = c.with(i, rng.gen_range(lo.get(i)..hi.get(i)));
            }
            if !self.contains_canonical(&c) {
                continue;
            }
            let d = self.frame.scale * self.signed_canonical(&c);
            if d >= margin && d > 0.0 {
                out.push(self.to_world(&c));
                if out.len() == n {
                    return Ok(out);
                }
            }
        }
        Err(Error::Sampling(format!(
            "found {} of {n} points with margin {margin} in `{}` after {budget} attempts",
            out.len(),
            self.name
        )))
    }

    pub fn to_spec(&self) -> Result<DomainSpec> {
        DomainSpec::from_domain(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        DomainSpec::parse(text)?.build()
    }

    fn compute_id(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        shape_kind(&self.shape).as_str().hash(&mut h);
        let mut put = |v: f64| v.to_bits().hash(&mut h);
        match &self.shape {
            Shape::Ball { dim } => put(*dim as f64),
            Shape::PuncturedBall { dim, puncture } => {
                put(*dim as f64);
                puncture.coords().iter().for_each(|v| put(*v));
            }
            Shape::SlitDisk => {}
            Shape::HalfPlane { dim } => put(*dim as f64),
            Shape::StraightTube { dim, length, radius } => {
                put(*dim as f64);
                put(*length);
                put(*radius);
            }
            Shape::Zigzag(z) => {
                put(z.radius());
                z.vertices()
                    .iter()
                    .for_each(|v| v.coords().iter().for_each(|c| put(*c)));
            }
            Shape::Image(im) => {
                put(im.source_radius());
                im.source_center().coords().iter().for_each(|v| put(*v));
                put(Arc::as_ptr(im) as usize as f64);
            }
        }
        put(self.frame.scale);
        self.frame.rot.iter().flatten().for_each(|v| put(*v));
        self.frame.shift.coords().iter().for_each(|v| put(*v));
        h.finish()
    }
}

fn shape_kind(shape: &Shape) -> DomainKind {
    match shape {
        Shape::Ball { .. } => DomainKind::Ball,
        Shape::PuncturedBall { .. } => DomainKind::PuncturedBall,
        Shape::SlitDisk => DomainKind::SlitDisk,
        Shape::HalfPlane { .. } => DomainKind::HalfPlane,
        Shape::StraightTube { .. } => DomainKind::StraightTube,
        Shape::Zigzag(_) => DomainKind::ZigzagTube,
        Shape::Image(_) => DomainKind::Image,
    }
}

fn ones(dim: usize) -> Point {
    let mut p = Point::origin(dim);
    for i in 0..dim {
        p = p.with(i, 1.0);
    }
    p
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::validation("dim", "must be 2 or 3"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(x: f64, y: f64) -> Point {
        Point::new2(x, y)
    }

    #[test]
    fn distance_examples() {
        let ball = Domain::ball(p2(0.0, 0.0), 1.0).unwrap();
        assert_eq!(ball.dist_to_boundary(&p2(0.0, 0.0)).unwrap(), 1.0);

        let slit = Domain::slit_disk();
        let d = slit.dist_to_boundary(&p2(0.5, 0.1)).unwrap();
        assert!((d - 0.1).abs() < 1e-15);
        // the circle is farther: 1 - sqrt(1/4 + t^2)
        assert!(1.0 - (0.25f64 + 0.01).sqrt() > 0.1);

        let pb = Domain::punctured_ball(p2(0.0, 0.0), 1.0, p2(0.5, 0.0)).unwrap();
        assert!((pb.dist_to_boundary(&p2(0.4, 0.0)).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn containment_examples() {
        let ball = Domain::ball(p2(0.0, 0.0), 1.0).unwrap();
        assert!(ball.contains(&p2(0.999, 0.0)));
        let slit = Domain::slit_disk();
        assert!(!slit.contains(&p2(0.5, 0.0)));
        assert!(!slit.contains(&p2(1.0 + 1e-9, 0.0)));
        assert!(slit.contains(&p2(-0.5, 0.0)));
        assert!(slit.dist_to_boundary(&p2(0.5, 0.0)).is_err());
        let pb = Domain::punctured_ball(p2(0.0, 0.0), 1.0, p2(0.5, 0.0)).unwrap();
        assert!(!pb.contains(&p2(0.5, 0.0)));
    }

    #[test]
    fn segment_inside_examples() {
        let ball = Domain::ball(p2(0.0, 0.0), 1.0).unwrap();
        assert!(ball.segment_inside(&p2(-0.5, 0.0), &p2(0.5, 0.0)));
        let slit = Domain::slit_disk();
        assert!(!slit.segment_inside(&p2(0.5, 0.1), &p2(0.5, -0.1)));
        assert!(slit.segment_inside(&p2(-0.5, 0.1), &p2(-0.5, -0.1)));
        // dense-sampling oracle for the last case
        for k in 0..=1000 {
            let t = k as f64 / 1000.0;
            assert!(slit.contains(&p2(-0.5, 0.1).lerp(&p2(-0.5, -0.1), t)));
        }
    }

    #[test]
    fn segment_through_puncture_rejected() {
        let pb = Domain::punctured_ball(p2(0.0, 0.0), 1.0, p2(0.3, 0.0)).unwrap();
        assert!(!pb.segment_inside(&p2(0.0, 0.0), &p2(0.7, 0.0)));
        assert!(pb.segment_inside(&p2(0.0, 0.1), &p2(0.7, 0.1)));
    }

    #[test]
    fn sampling_examples() {
        let ball = Domain::ball(p2(0.0, 0.0), 1.0).unwrap();
        let pts = ball.sample_interior(3, 0.5, 7).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| ball.dist_to_boundary(p).unwrap() >= 0.5));
        assert_eq!(pts, ball.sample_interior(3, 0.5, 7).unwrap());

        let slit = Domain::slit_disk();
        let pts = slit.sample_interior(100, 0.01, 1).unwrap();
        assert!(pts.iter().all(|p| slit.dist_to_boundary(p).unwrap() >= 0.01));

        assert!(matches!(
            ball.sample_interior(1, 1.5, 0),
            Err(Error::Sampling(_))
        ));
    }

    #[test]
    fn frames_scale_distances() {
        let ball = Domain::ball(p2(1.0, 2.0), 3.0).unwrap();
        assert!((ball.dist_to_boundary(&p2(1.0, 2.0)).unwrap() - 3.0).abs() < 1e-15);
        let rot = Similarity::new(2.0, crate::geom::rotation2(0.5), p2(-1.0, 0.0)).unwrap();
        let moved = Domain::slit_disk().transformed(&rot);
        let x = p2(0.5, 0.1);
        let want = 2.0 * Domain::slit_disk().dist_to_boundary(&x).unwrap();
        assert!((moved.dist_to_boundary(&rot.apply(&x)).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn tube_distance() {
        let t = Domain::straight_tube(2, 3.0, 0.1).unwrap();
        assert!((t.dist_to_boundary(&p2(1.0, 0.0)).unwrap() - 0.1).abs() < 1e-15);
        // end cap: axis endpoint sits at the centre of a ball of radius r
        assert!((t.dist_to_boundary(&p2(3.0, 0.0)).unwrap() - 0.1).abs() < 1e-15);
        assert!(t.contains(&p2(3.05, 0.0)));
        assert!(!t.contains(&p2(3.0, 0.1)));
        let t3 = Domain::straight_tube(3, 1.0, 0.2).unwrap();
        assert!((t3.dist_to_boundary(&Point::new3(0.5, 0.1, 0.0)).unwrap() - 0.1).abs() < 1e-15);
    }
}
