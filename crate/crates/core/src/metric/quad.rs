//! Quadrature of the quasihyperbolic density `1/d` along straight segments.
//!
//! The working integrator is a globally adaptive 7/15-point Gauss–Kronrod
//! scheme: every segment starts as one interval, and the interval with the
//! largest `|K15 - G7|` is bisected until the summed estimates drop below the
//! tolerance. The boundary distance is only piecewise smooth (kinks where the
//! nearest boundary feature changes), which bisection absorbs.
//!
//! [`lipschitz_enclosure`] is a slower, independent bracket that relies only
//! on `d` being 1-Lipschitz.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Interval budget per integration call.
const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

struct Piece {
    seg: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// One 15-point rule on `[lo, hi]` of the segment `a -> b` (parameter in
/// `[0, 1]`). Fails if a node leaves the domain.
fn kronrod(domain: &Domain, a: &Point, b: &Point, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let len = a.dist(b);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let f = |t: f64| -> Result<f64> {
        let p = a.lerp(b, t);
        if let Some(d) = domain.interior_distance_canonical(&p) {
            Ok(len / d)
        } else {
            Err(Error::Path(format!(
                "segment leaves the domain at canonical point {p}"
            )))
        }
    };
    let fc = f(mid)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx)? + f(mid + dx)?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Ok((k * half, ((k - g) * half).abs()))
}

/// Integrates `1/d` along the polyline `pts` (canonical coordinates) to
/// absolute error `tol`. The reported error is the achieved estimate.
pub(crate) fn integrate_polyline(domain: &Domain, pts: &[Point], tol: f64) -> Result<Quadrature> {
    let mut heap = BinaryHeap::new();
    let mut err = 0.0;
    for (seg, w) in pts.windows(2).enumerate() {
        let (v, e) = kronrod(domain, &w[0], &w[1], 0.0, 1.0)?;
        err += e;
        heap.push(Piece {
            seg,
            lo: 0.0,
            hi: 1.0,
            value: v,
            error: e,
        });
    }
    while err > tol && heap.len() < MAX_INTERVALS {
        let worst = heap.pop().expect("heap holds every interval");
        let (a, b) = (&pts[worst.seg], &pts[worst.seg + 1]);
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = kronrod(domain, a, b, worst.lo, mid)?;
        let (v2, e2) = kronrod(domain, a, b, mid, worst.hi)?;
        err += e1 + e2 - worst.error;
        heap.push(Piece {
            seg: worst.seg,
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            seg: worst.seg,
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
    }
    // running sums drift; recompute once from the leaves
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    Ok(Quadrature { value, error })
}

pub(crate) fn integrate_segment(domain: &Domain, a: &Point, b: &Point, tol: f64) -> Result<Quadrature> {
    integrate_polyline(domain, &[*a, *b], tol)
}

/// Bracket `[lo, hi]` for `∫ 1/d` along a world-coordinate polyline, using
/// only that `d` is 1-Lipschitz: on a piece of half-length `h` with midpoint
/// `m`, the density lies in `[1/(d(m)+h), 1/(d(m)-h)]`. Pieces are bisected
/// (widest first) until the bracket is narrower than `width` or `max_pieces`
/// is reached.
pub fn lipschitz_enclosure(
    domain: &Domain,
    pts: &[Point],
    width: f64,
    max_pieces: usize,
) -> Result<(f64, f64)> {
    struct Span {
        a: Point,
        b: Point,
        lo: f64,
        hi: f64,
    }
    impl PartialEq for Span {
        fn eq(&self, o: &Self) -> bool {
            self.hi - self.lo == o.hi - o.lo
        }
    }
    impl Eq for Span {}
    impl PartialOrd for Span {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Span {
        fn cmp(&self, o: &Self) -> Ordering {
            (self.hi - self.lo).total_cmp(&(o.hi - o.lo))
        }
    }
    let bound = |a: Point, b: Point| -> Result<Span> {
        let m = a.midpoint(&b);
        let len = a.dist(&b);
        let h = 0.5 * len;
        let dm = domain.dist_to_boundary(&m)?;
        let lo = len / (dm + h);
        let hi = if dm > h { len / (dm - h) } else { f64::INFINITY };
        Ok(Span { a, b, lo, hi })
    };
    let mut heap = BinaryHeap::new();
    for w in pts.windows(2) {
        heap.push(bound(w[0], w[1])?);
    }
    loop {
        let (lo, hi) = heap.iter().fold((0.0, 0.0), |(l, h), s| (l + s.lo, h + s.hi));
        if hi - lo <= width || heap.len() >= max_pieces {
            return Ok((lo, hi));
        }
        let s = heap.pop().expect("non-empty");
        let m = s.a.midpoint(&s.b);
        heap.push(bound(s.a, m)?);
        heap.push(bound(m, s.b)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_integral_is_log2() {
        let ball = Domain::ball(Point::new2(0.0, 0.0), 1.0).unwrap();
        let q = integrate_segment(&ball, &Point::new2(0.0, 0.0), &Point::new2(0.5, 0.0), 1e-12)
            .unwrap();
        assert!((q.value - 2f64.ln()).abs() < 1e-12, "{}", q.value);
    }

    #[test]
    fn kink_through_slit_tip_region() {
        // vertical segment left of the slit tip: d = min(1-|p|, |p|) has a kink
        let slit = Domain::slit_disk();
        let a = Point::new2(-0.2, 0.3);
        let b = Point::new2(-0.2, -0.3);
        let q = integrate_segment(&slit, &a, &b, 1e-10).unwrap();
        let (lo, hi) = lipschitz_enclosure(&slit, &[a, b], 1e-4, 1 << 20).unwrap();
        assert!(lo <= q.value + 1e-10 && q.value <= hi + 1e-10);
    }

    #[test]
    fn leaving_domain_is_a_path_error() {
        let slit = Domain::slit_disk();
        let r = integrate_segment(&slit, &Point::new2(0.5, 0.1), &Point::new2(0.5, -0.1), 1e-8);
        // the node at t=0.5 lands exactly on the slit
        assert!(matches!(r, Err(Error::Path(_))));
    }
}
