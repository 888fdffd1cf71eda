//! Points, similarity frames and a few Euclidean primitives.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `R^2` or `R^3`. Unused trailing coordinates are kept at zero so
/// that arithmetic can run on the full array.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    c: [f64; 3],
    dim: u8,
}

impl Point {
    pub fn new2(x: f64, y: f64) -> Self {
        Point {
            c: [x, y, 0.0],
            dim: 2,
        }
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point {
            c: [x, y, z],
            dim: 3,
        }
    }

    pub fn origin(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
        Point {
            c: [0.0; 3],
            dim: dim as u8,
        }
    }

    /// Basis vector `e_axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut p = Point::origin(dim);
        p.c[axis] = 1.0;
        p
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if dim != 2 && dim != 3 {
            return Err(Error::validation(
                "point",
                format!("expected 2 or 3 coordinates, got {dim}"),
            ));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("point", "coordinates must be finite"));
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(coords);
        Ok(Point { c, dim: dim as u8 })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    pub fn raw(&self) -> [f64; 3] {
        self.c
    }

    pub fn get(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub fn with(&self, i: usize, v: f64) -> Self {
        let mut p = *self;
        p.c[i] = v;
        p
    }

    pub fn dot(&self, o: &Point) -> f64 {
        self.c[0] * o.c[0] + self.c[1] * o.c[1] + self.c[2] * o.c[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, o: &Point) -> f64 {
        (*self - *o).norm()
    }

    pub fn lerp(&self, o: &Point, t: f64) -> Point {
        *self + (*o - *self) * t
    }

    pub fn midpoint(&self, o: &Point) -> Point {
        (*self + *o) * 0.5
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// Counter-clockwise perpendicular, planar points only.
    pub fn perp(&self) -> Point {
        Point::new2(-self.c[1], self.c[0])
    }

    /// Planar cross product `self × o` (z-component).
    pub fn cross2(&self, o: &Point) -> f64 {
        self.c[0] * o.c[1] - self.c[1] * o.c[0]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point {
            c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2]],
            dim: self.dim.max(o.dim),
        }
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point {
            c: [self.c[0] - o.c[0], self.c[1] - o.c[1], self.c[2] - o.c[2]],
            dim: self.dim.max(o.dim),
        }
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point {
            c: [self.c[0] * s, self.c[1] * s, self.c[2] * s],
            dim: self.dim,
        }
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        self * -1.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

/// Distance from `p` to the closed segment `[a, b]` and the clamped parameter
/// of the foot point.
pub fn segment_distance(p: &Point, a: &Point, b: &Point) -> (f64, f64) {
    let ab = *b - *a;
    let len2 = ab.dot(&ab);
    let t = if len2 > 0.0 {
        ((*p - *a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p.dist(&a.lerp(b, t)), t)
}

/// Square matrix stored row-major in a fixed 3x3 block.
pub type Mat3 = [[f64; 3]; 3];

pub fn identity3() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

/// Planar rotation by `angle` radians, embedded in the 3x3 block.
pub fn rotation2(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn mat_vec(m: &Mat3, p: &Point) -> Point {
    let mut out = Point::origin(p.dim());
    for i in 0..p.dim() {
        let mut acc = 0.0;
        for j in 0..p.dim() {
            acc += m[i][j] * p.c[j];
        }
        out.c[i] = acc;
    }
    out
}

fn mat_t_vec(m: &Mat3, p: &Point) -> Point {
    let mut out = Point::origin(p.dim());
    for i in 0..p.dim() {
        let mut acc = 0.0;
        for j in 0..p.dim() {
            acc += m[j][i] * p.c[j];
        }
        out.c[i] = acc;
    }
    out
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Reads a `dim x dim` orthogonal matrix from nested rows.
pub fn rotation_from_rows(rows: &[Vec<f64>], dim: usize) -> Result<Mat3> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::validation(
            "rotation",
            format!("expected a {dim}x{dim} matrix"),
        ));
    }
    let mut m = identity3();
    for i in 0..dim {
        for j in 0..dim {
            m[i][j] = rows[i][j];
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            let g: f64 = (0..dim).map(|k| m[k][i] * m[k][j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (g - want).abs() > 1e-9 {
                return Err(Error::validation("rotation", "matrix is not orthogonal"));
            }
        }
    }
    Ok(m)
}

pub fn rotation_rows(m: &Mat3, dim: usize) -> Vec<Vec<f64>> {
    (0..dim).map(|i| m[i][..dim].to_vec()).collect()
}

/// `x ↦ scale · R x + shift`, used both as domain frames and as maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub rot: Mat3,
    pub shift: Point,
}

impl Similarity {
    pub fn identity(dim: usize) -> Self {
        Similarity {
            scale: 1.0,
            rot: identity3(),
            shift: Point::origin(dim),
        }
    }

    pub fn new(scale: f64, rot: Mat3, shift: Point) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::validation("scale", "must be a positive finite real"));
        }
        Ok(Similarity { scale, rot, shift })
    }

    pub fn dim(&self) -> usize {
        self.shift.dim()
    }

    pub fn apply(&self, p: &Point) -> Point {
        mat_vec(&self.rot, p) * self.scale + self.shift
    }

    pub fn invert(&self, p: &Point) -> Point {
        mat_t_vec(&self.rot, &(*p - self.shift)) * (1.0 / self.scale)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            scale: self.scale * inner.scale,
            rot: mat_mul(&self.rot, &inner.rot),
            shift: self.apply(&inner.shift),
        }
    }

    pub fn is_rotation_identity(&self) -> bool {
        let id = identity3();
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| (self.rot[i][j] - id[i][j]).abs() < 1e-15))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distance_cases() {
        let a = Point::new2(0.0, 0.0);
        let b = Point::new2(1.0, 0.0);
        let (d, t) = segment_distance(&Point::new2(0.5, 0.2), &a, &b);
        assert!((d - 0.2).abs() < 1e-15 && (t - 0.5).abs() < 1e-15);
        let (d, t) = segment_distance(&Point::new2(-3.0, 4.0), &a, &b);
        assert!((d - 5.0).abs() < 1e-15 && t == 0.0);
    }

    #[test]
    fn similarity_roundtrip_and_compose() {
        let s = Similarity::new(3.0, rotation2(0.7), Point::new2(1.0, -2.0)).unwrap();
        let p = Point::new2(0.3, 0.4);
        assert!(s.invert(&s.apply(&p)).dist(&p) < 1e-14);
        let t = Similarity::new(0.5, rotation2(-0.2), Point::new2(0.0, 1.0)).unwrap();
        let st = s.compose(&t);
        assert!(st.apply(&p).dist(&s.apply(&t.apply(&p))) < 1e-14);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(Point::from_slice(&[1.0]).is_err());
        assert!(Point::from_slice(&[1.0, f64::NAN]).is_err());
        assert!(rotation_from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]], 2).is_err());
    }
}
