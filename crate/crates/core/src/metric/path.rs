use serde::{Deserialize, Serialize};

use super::quad::integrate_polyline;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Which side of the true value an estimate sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateKind {
    Upper,
    Lower,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub abs_tol: f64,
}

impl MetricEstimate {
    pub fn upper(value: f64, abs_tol: f64) -> Self {
        MetricEstimate {
            value,
            kind: EstimateKind::Upper,
            abs_tol,
        }
    }

    pub fn lower(value: f64) -> Self {
        MetricEstimate {
            value,
            kind: EstimateKind::Lower,
            abs_tol: 0.0,
        }
    }

    pub fn exact(value: f64, abs_tol: f64) -> Self {
        MetricEstimate {
            value,
            kind: EstimateKind::Exact,
            abs_tol,
        }
    }
}

/// Polyline of interior points whose every segment is certified inside the
/// domain it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    points: Vec<Point>,
}

impl Path {
    pub fn new(domain: &Domain, points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Path("a path needs at least two points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !domain.contains(p) {
                return Err(Error::Path(format!("vertex {i} {p} is outside the domain")));
            }
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(Error::Path(format!("vertices {i} and {} coincide", i + 1)));
            }
            if !domain.segment_inside(&w[0], &w[1]) {
                return Err(Error::Path(format!(
                    "segment {i} from {} to {} is not certified inside `{}`",
                    w[0],
                    w[1],
                    domain.name()
                )));
            }
        }
        Ok(Path { points })
    }

    /// Skips the certification; for points already known to be valid.
    pub(crate) fn trusted(points: Vec<Point>) -> Self {
        Path { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn start(&self) -> Point {
        self.points[0]
    }

    pub fn end(&self) -> Point {
        *self.points.last().expect("paths are non-empty")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Euclidean length.
    pub fn euclidean_length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }

    pub fn reversed(&self) -> Path {
        let mut pts = self.points.clone();
        pts.reverse();
        Path { points: pts }
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.end() != other.start() {
            return Err(Error::Path("paths do not share an endpoint".into()));
        }
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points[1..]);
        Ok(Path { points: pts })
    }
}

/// Quasihyperbolic length `∫ |dz| / d(z)` of a path, to absolute error `tol`.
pub fn qh_length(path: &Path, domain: &Domain, tol: f64) -> Result<MetricEstimate> {
    if !(tol > 0.0) {
        return Err(Error::validation("tol", "must be positive"));
    }
    let canon: Vec<Point> = path.points.iter().map(|p| domain.to_canonical(p)).collect();
    let q = integrate_polyline(domain, &canon, tol)?;
    Ok(MetricEstimate::exact(q.value, tol.max(q.error)))
}

/// Quasihyperbolic length of each segment, each to `tol`.
pub(crate) fn segment_qh_lengths(path: &Path, domain: &Domain, tol: f64) -> Result<Vec<f64>> {
    path.points
        .windows(2)
        .map(|w| {
            let a = domain.to_canonical(&w[0]);
            let b = domain.to_canonical(&w[1]);
            integrate_polyline(domain, &[a, b], tol).map(|q| q.value)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::quad::lipschitz_enclosure;

    fn p2(x: f64, y: f64) -> Point {
        Point::new2(x, y)
    }

    #[test]
    fn radius_of_unit_ball() {
        let ball = Domain::ball(p2(0.0, 0.0), 1.0).unwrap();
        let path = Path::new(&ball, vec![p2(0.0, 0.0), p2(0.5, 0.0)]).unwrap();
        let est = qh_length(&path, &ball, 1e-9).unwrap();
        assert!((est.value - 2f64.ln()).abs() <= 1e-9);
        assert_eq!(est.kind, EstimateKind::Exact);
    }

    #[test]
    fn short_segment_is_first_order() {
        let ball = Domain::ball(p2(0.0, 0.0), 1.0).unwrap();
        let a = p2(0.2, 0.1);
        let b = p2(0.2 + 1e-6, 0.1);
        let path = Path::new(&ball, vec![a, b]).unwrap();
        let v = qh_length(&path, &ball, 1e-15).unwrap().value;
        let first = 1e-6 / ball.dist_to_boundary(&a).unwrap();
        assert!((v - first).abs() < 1e-11);
    }

    #[test]
    fn lemma_instance_in_ball_around_x() {
        // B_x = B(x, d(x)) with |x-y| = d(x)/2: bound 2 log 1.5
        let x = p2(0.1, 0.2);
        let bx = Domain::ball(x, 0.7).unwrap();
        let y = x + p2(0.35, 0.0);
        let path = Path::new(&bx, vec![x, y]).unwrap();
        let v = qh_length(&path, &bx, 1e-9).unwrap().value;
        assert!(v <= 2.0 * 1.5f64.ln() + 1e-9);
        // exact value along a radius: log(1/(1-1/2))
        assert!((v - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn agrees_with_lipschitz_bracket() {
        let slit = Domain::slit_disk();
        let pts = vec![p2(0.5, 0.2), p2(-0.1, 0.15), p2(-0.1, -0.15), p2(0.5, -0.2)];
        let path = Path::new(&slit, pts.clone()).unwrap();
        let v = qh_length(&path, &slit, 1e-9).unwrap().value;
        let (lo, hi) = lipschitz_enclosure(&slit, &pts, 1e-3, 1 << 20).unwrap();
        assert!(lo - 1e-9 <= v && v <= hi + 1e-9, "{lo} {v} {hi}");
    }

    #[test]
    fn rejects_crossing_the_slit() {
        let slit = Domain::slit_disk();
        assert!(Path::new(&slit, vec![p2(0.5, 0.1), p2(0.5, -0.1)]).is_err());
        assert!(Path::new(&slit, vec![p2(0.5, 0.1)]).is_err());
        assert!(Path::new(&slit, vec![p2(0.5, 0.1), p2(0.5, 0.1)]).is_err());
    }
}
