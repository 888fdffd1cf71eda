//! Homeomorphisms between domains, with forward and inverse evaluators.

mod spec;
mod straightener;

use std::sync::Arc;

use serde::Serialize;

pub use spec::{map_from_json, MapSpec};
pub use straightener::{StraightenerParams, ZigzagStraightener};

use crate::domain::{Domain, DomainKind};
use crate::error::{Error, Result};
use crate::geom::{Mat3, Point, Similarity};
use crate::metric::Path;

/// A pointwise map with an inverse.
pub trait PointMap: Send + Sync {
    fn name(&self) -> String;
    fn forward(&self, p: &Point) -> Point;
    fn inverse(&self, p: &Point) -> Point;
    /// The map as a similarity, when it is one.
    fn as_similarity(&self) -> Option<Similarity> {
        None
    }
}

/// Constants a map is known (or was calibrated) to satisfy.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Advertised {
    pub m_qh: Option<f64>,
    pub m_bilip: Option<f64>,
    pub k_qc: Option<f64>,
    pub notes: String,
}

/// A homeomorphism `source -> target` under test.
#[derive(Clone)]
pub struct MapUnderTest {
    pub name: String,
    pub source: Domain,
    pub target: Domain,
    pub map: Arc<dyn PointMap>,
    pub advertised: Advertised,
}

impl std::fmt::Debug for MapUnderTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MapUnderTest")
            .field("name", &self.name)
            .field("source", &self.source.name())
            .field("target", &self.target.name())
            .field("advertised", &self.advertised)
            .finish()
    }
}

impl MapUnderTest {
    pub fn forward(&self, p: &Point) -> Point {
        self.map.forward(p)
    }

    pub fn inverse(&self, p: &Point) -> Point {
        self.map.inverse(p)
    }

    /// The inverse map as a map under test from `target` to `source`.
    pub fn inverted(&self) -> MapUnderTest {
        MapUnderTest {
            name: format!("inverse of {}", self.name),
            source: self.target.clone(),
            target: self.source.clone(),
            map: Arc::new(Inverted(self.map.clone())),
            advertised: self.advertised.clone(),
        }
    }

    /// Largest `|f^-1(f(p)) - p|` and `|f(f^-1(q)) - q|` over the given
    /// source and target samples; also checks that images land inside.
    pub fn roundtrip_error(&self, source_pts: &[Point], target_pts: &[Point]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for p in source_pts {
            let q = self.forward(p);
            if !self.target.contains(&q) {
                return Err(Error::MapConsistency(format!(
                    "{} sends {p} to {q}, outside `{}`",
                    self.name,
                    self.target.name()
                )));
            }
            worst = worst.max(self.inverse(&q).dist(p));
        }
        for q in target_pts {
            worst = worst.max(self.forward(&self.inverse(q)).dist(q));
        }
        Ok(worst)
    }
}

struct Inverted(Arc<dyn PointMap>);

impl PointMap for Inverted {
    fn name(&self) -> String {
        format!("inverse of {}", self.0.name())
    }
    fn forward(&self, p: &Point) -> Point {
        self.0.inverse(p)
    }
    fn inverse(&self, p: &Point) -> Point {
        self.0.forward(p)
    }
}

#[derive(Debug, Clone)]
pub struct SimilarityMap(pub Similarity);

impl PointMap for SimilarityMap {
    fn name(&self) -> String {
        if self.0.scale == 1.0 && self.0.is_rotation_identity() && self.0.shift.norm() == 0.0 {
            "identity".into()
        } else {
            format!("similarity(scale={})", self.0.scale)
        }
    }
    fn forward(&self, p: &Point) -> Point {
        self.0.apply(p)
    }
    fn inverse(&self, p: &Point) -> Point {
        self.0.invert(p)
    }
    fn as_similarity(&self) -> Option<Similarity> {
        Some(self.0)
    }
}

/// `x ↦ c + R g((x - c)/R)` with `g(y) = y |y|^(a-1)`, for the ball `B(c, R)`.
#[derive(Debug, Clone)]
pub struct RadialStretch {
    pub exponent: f64,
    frame: Similarity,
}

fn power_radial(y: &Point, a: f64) -> Point {
    let n = y.norm();
    if n == 0.0 {
        *y
    } else {
        *y * n.powf(a - 1.0)
    }
}

impl PointMap for RadialStretch {
    fn name(&self) -> String {
        format!("radial_stretch(a={})", self.exponent)
    }
    fn forward(&self, p: &Point) -> Point {
        self.frame.apply(&power_radial(&self.frame.invert(p), self.exponent))
    }
    fn inverse(&self, p: &Point) -> Point {
        self.frame.apply(&power_radial(&self.frame.invert(p), 1.0 / self.exponent))
    }
}

pub fn identity(source: &Domain) -> MapUnderTest {
    MapUnderTest {
        name: "identity".into(),
        source: source.clone(),
        target: source.clone(),
        map: Arc::new(SimilarityMap(Similarity::identity(source.dim()))),
        advertised: Advertised {
            m_qh: Some(1.0),
            m_bilip: Some(1.0),
            k_qc: Some(1.0),
            notes: "identity map".into(),
        },
    }
}

/// `x ↦ λ R x + b`; the target is the image domain of the same kind.
pub fn similarity(lambda: f64, rotation: Mat3, translation: Point, source: &Domain) -> Result<MapUnderTest> {
    if translation.dim() != source.dim() {
        return Err(Error::validation("translation", "dimension mismatch"));
    }
    let sim = Similarity::new(lambda, rotation, translation)?;
    let target = source.transformed(&sim);
    Ok(MapUnderTest {
        name: format!("similarity(scale={lambda})"),
        source: source.clone(),
        target,
        map: Arc::new(SimilarityMap(sim)),
        advertised: Advertised {
            m_qh: Some(1.0),
            m_bilip: None,
            k_qc: Some(1.0),
            notes: "similarities preserve k exactly".into(),
        },
    })
}

/// Radial power map of a ball onto itself; `a = 1` is the identity.
pub fn radial_stretch(a: f64, source: &Domain) -> Result<MapUnderTest> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::validation("exponent", "must be positive"));
    }
    if source.kind() != DomainKind::Ball {
        return Err(Error::validation("source", "radial stretch needs a ball"));
    }
    let k = if a >= 1.0 { a } else { 1.0 / a };
    Ok(MapUnderTest {
        name: format!("radial_stretch(a={a})"),
        source: source.clone(),
        target: source.clone(),
        map: Arc::new(RadialStretch {
            exponent: a,
            frame: *source.frame(),
        }),
        advertised: Advertised {
            m_qh: None,
            m_bilip: None,
            k_qc: Some(k),
            notes: "radial power map; linear dilatation max(a, 1/a)".into(),
        },
    })
}

/// Tube straightener with the default segment length and box.
pub fn zigzag_straightener(m: usize, r: f64, bend: f64) -> Result<MapUnderTest> {
    ZigzagStraightener::build(&StraightenerParams::new(m, r, bend))
}

const PUSH_DEPTH_CAP: u32 = 30;

/// Image of a path: each source segment is subdivided until its image chord
/// is certified inside the target and the chord deviates from the image
/// curve at the midpoint by less than `refine_tol`.
pub fn push_path(map: &MapUnderTest, path: &Path, refine_tol: f64) -> Result<Path> {
    if !(refine_tol > 0.0) {
        return Err(Error::validation("refine_tol", "must be positive"));
    }
    let image = |p: &Point| -> Result<Point> {
        let q = map.forward(p);
        if map.target.contains(&q) {
            Ok(q)
        } else {
            Err(Error::MapConsistency(format!(
                "{} sends {p} to {q}, outside `{}`",
                map.name,
                map.target.name()
            )))
        }
    };
    fn split(
        map: &MapUnderTest,
        image: &dyn Fn(&Point) -> Result<Point>,
        a: Point,
        fa: Point,
        b: Point,
        fb: Point,
        tol: f64,
        depth: u32,
        out: &mut Vec<Point>,
    ) -> Result<()> {
        let m = a.midpoint(&b);
        let fm = image(&m)?;
        let ok = fm.dist(&fa.midpoint(&fb)) <= tol && map.target.segment_inside(&fa, &fb);
        if ok {
            out.push(fb);
            return Ok(());
        }
        if depth >= PUSH_DEPTH_CAP {
            return Err(Error::MapConsistency(format!(
                "could not refine the image of segment {a} - {b} of {}",
                map.name
            )));
        }
        split(map, image, a, fa, m, fm, tol, depth + 1, out)?;
        split(map, image, m, fm, b, fb, tol, depth + 1, out)
    }
    let pts = path.points();
    let mut out = vec![image(&pts[0])?];
    for w in pts.windows(2) {
        let fa = *out.last().unwrap();
        let fb = image(&w[1])?;
        split(map, &image, w[0], fa, w[1], fb, refine_tol, 0, &mut out)?;
    }
    out.dedup();
    Path::new(&map.target, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rotation2;

    fn unit_disk() -> Domain {
        Domain::ball(Point::new2(0.0, 0.0), 1.0).unwrap()
    }

    #[test]
    fn stretch_formula_and_roundtrip() {
        let f = radial_stretch(2.0, &unit_disk()).unwrap();
        let y = f.forward(&Point::new2(0.3, 0.4));
        assert!((y.norm() - 0.25).abs() < 1e-15);
        assert_eq!(f.forward(&Point::new2(0.0, 0.0)), Point::new2(0.0, 0.0));
        let pts = unit_disk().sample_interior(1000, 0.0, 3).unwrap();
        assert!(f.roundtrip_error(&pts, &pts).unwrap() <= 1e-9);
        let id = radial_stretch(1.0, &unit_disk()).unwrap();
        for p in &pts {
            assert!(id.forward(p).dist(p) < 1e-15);
        }
    }

    #[test]
    fn similarity_target_is_image_ball() {
        let f = similarity(3.0, rotation2(0.5), Point::new2(1.0, 2.0), &unit_disk()).unwrap();
        assert!(f.target.contains(&Point::new2(3.9, 2.0)));
        assert!(!f.target.contains(&Point::new2(4.1, 2.0)));
        let d = f.target.dist_to_boundary(&Point::new2(1.0, 2.0)).unwrap();
        assert!((d - 3.0).abs() < 1e-14);
    }

    #[test]
    fn push_identity_is_same_path() {
        let d = unit_disk();
        let path = Path::new(&d, vec![Point::new2(0.0, 0.0), Point::new2(0.5, 0.1)]).unwrap();
        let img = push_path(&identity(&d), &path, 1e-6).unwrap();
        assert_eq!(img.points(), path.points());
    }
}
