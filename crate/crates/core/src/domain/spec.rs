//! JSON documents describing domains.
//!
//! ```json
//! {"kind": "ball", "center": [0, 0], "radius": 1}
//! {"kind": "punctured_ball", "center": [0, 0], "radius": 1, "puncture": [0.5, 0]}
//! {"kind": "slit_disk"}
//! {"kind": "half_plane", "dim": 2}
//! {"kind": "straight_tube", "length": 4.0, "radius": 0.05}
//! {"kind": "zigzag_tube", "vertices": [[0, 0], [1, 0], [1, 1]], "radius": 0.05}
//! ```
//!
//! Optional fields: `name` on every kind; `rotation` (row-major orthogonal
//! matrix) on every kind but `zigzag_tube`; `center`/`radius` on `slit_disk`;
//! `center`/`scale` on `half_plane`; `center`/`dim` on `straight_tube`.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use super::{Domain, Shape, ZigzagGeometry};
use crate::error::{Error, Result};
use crate::geom::{identity3, rotation_from_rows, rotation_rows, Mat3, Point, Similarity};

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec {
    Ball {
        center: Point,
        radius: f64,
        rotation: Option<Mat3>,
    },
    PuncturedBall {
        center: Point,
        radius: f64,
        puncture: Point,
        rotation: Option<Mat3>,
    },
    SlitDisk {
        center: Point,
        radius: f64,
        rotation: Option<Mat3>,
    },
    HalfPlane {
        dim: usize,
        center: Point,
        scale: f64,
        rotation: Option<Mat3>,
    },
    StraightTube {
        center: Point,
        length: f64,
        radius: f64,
        rotation: Option<Mat3>,
    },
    ZigzagTube {
        vertices: Vec<Point>,
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub name: Option<String>,
    pub shape: ShapeSpec,
}

pub(crate) struct Fields<'a> {
    pub(crate) obj: &'a Map<String, Value>,
    pub(crate) prefix: String,
}

impl<'a> Fields<'a> {
    pub(crate) fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    pub(crate) fn f64(&self, key: &str) -> Result<f64> {
        self.opt_f64(key)?
            .ok_or_else(|| Error::validation(self.path(key), "missing required field"))
    }

    pub(crate) fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.obj.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| Error::validation(self.path(key), "expected a finite number")),
        }
    }

    pub(crate) fn point(&self, key: &str) -> Result<Point> {
        self.opt_point(key)?
            .ok_or_else(|| Error::validation(self.path(key), "missing required field"))
    }

    pub(crate) fn opt_point(&self, key: &str) -> Result<Option<Point>> {
        match self.obj.get(key) {
            None => Ok(None),
            Some(v) => point_value(v, &self.path(key)).map(Some),
        }
    }

    pub(crate) fn rotation(&self, dim: usize) -> Result<Option<Mat3>> {
        match self.obj.get("rotation") {
            None => Ok(None),
            Some(v) => {
                let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone())
                    .map_err(|e| Error::validation(self.path("rotation"), e.to_string()))?;
                rotation_from_rows(&rows, dim)
                    .map(Some)
                    .map_err(|e| Error::validation(self.path("rotation"), e.to_string()))
            }
        }
    }

    pub(crate) fn allow_only(&self, keys: &[&str]) -> Result<()> {
        for k in self.obj.keys() {
            if k != "kind" && k != "name" && !keys.contains(&k.as_str()) {
                return Err(Error::validation(self.path(k), "unknown field"));
            }
        }
        Ok(())
    }
}

pub(crate) fn point_value(v: &Value, path: &str) -> Result<Point> {
    let coords: Vec<f64> = v
        .as_array()
        .ok_or_else(|| Error::validation(path, "expected an array of numbers"))?
        .iter()
        .map(|c| {
            c.as_f64()
                .ok_or_else(|| Error::validation(path, "expected an array of numbers"))
        })
        .collect::<Result<_>>()?;
    Point::from_slice(&coords).map_err(|e| Error::validation(path, e.to_string()))
}

fn positive(v: f64, path: String) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::validation(path, "must be positive"))
    }
}

impl DomainSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_value(&v, "")
    }

    /// Reads a spec object; `prefix` is prepended to field paths in errors.
    pub fn from_value(v: &Value, prefix: &str) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::validation(prefix, "expected a JSON object"))?;
        let f = Fields {
            obj,
            prefix: prefix.to_string(),
        };
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::validation(f.path("kind"), "missing or not a string"))?;
        let name = match obj.get("name") {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::validation(f.path("name"), "expected a string")),
        };
        let shape = match kind {
            "ball" => {
                f.allow_only(&["center", "radius", "rotation"])?;
                let center = f.point("center")?;
                ShapeSpec::Ball {
                    radius: positive(f.f64("radius")?, f.path("radius"))?,
                    rotation: f.rotation(center.dim())?,
                    center,
                }
            }
            "punctured_ball" => {
                f.allow_only(&["center", "radius", "puncture", "rotation"])?;
                let center = f.point("center")?;
                ShapeSpec::PuncturedBall {
                    radius: positive(f.f64("radius")?, f.path("radius"))?,
                    puncture: f.point("puncture")?,
                    rotation: f.rotation(center.dim())?,
                    center,
                }
            }
            "slit_disk" => {
                f.allow_only(&["center", "radius", "rotation"])?;
                let center = f.opt_point("center")?.unwrap_or(Point::new2(0.0, 0.0));
                if center.dim() != 2 {
                    return Err(Error::validation(f.path("center"), "slit disk is planar"));
                }
                ShapeSpec::SlitDisk {
                    radius: positive(f.opt_f64("radius")?.unwrap_or(1.0), f.path("radius"))?,
                    rotation: f.rotation(2)?,
                    center,
                }
            }
            "half_plane" => {
                f.allow_only(&["dim", "center", "scale", "rotation"])?;
                let center = f.opt_point("center")?;
                let dim = match f.opt_f64("dim")? {
                    Some(d) if d == 2.0 || d == 3.0 => d as usize,
                    Some(_) => return Err(Error::validation(f.path("dim"), "must be 2 or 3")),
                    None => center.map_or(2, |c| c.dim()),
                };
                let center = center.unwrap_or(Point::origin(dim));
                if center.dim() != dim {
                    return Err(Error::validation(f.path("center"), "dimension mismatch"));
                }
                ShapeSpec::HalfPlane {
                    dim,
                    center,
                    scale: positive(f.opt_f64("scale")?.unwrap_or(1.0), f.path("scale"))?,
                    rotation: f.rotation(dim)?,
                }
            }
            "straight_tube" => {
                f.allow_only(&["dim", "center", "length", "radius", "rotation"])?;
                let dim = match f.opt_f64("dim")? {
                    Some(d) if d == 2.0 || d == 3.0 => d as usize,
                    Some(_) => return Err(Error::validation(f.path("dim"), "must be 2 or 3")),
                    None => f.opt_point("center")?.map_or(2, |c| c.dim()),
                };
                let center = f.opt_point("center")?.unwrap_or(Point::origin(dim));
                if center.dim() != dim {
                    return Err(Error::validation(f.path("center"), "dimension mismatch"));
                }
                ShapeSpec::StraightTube {
                    center,
                    length: positive(f.f64("length")?, f.path("length"))?,
                    radius: positive(f.f64("radius")?, f.path("radius"))?,
                    rotation: f.rotation(dim)?,
                }
            }
            "zigzag_tube" => {
                f.allow_only(&["vertices", "radius"])?;
                let arr = obj
                    .get("vertices")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::validation(f.path("vertices"), "expected an array"))?;
                let vertices = arr
                    .iter()
                    .enumerate()
                    .map(|(i, v)| point_value(v, &format!("{}[{i}]", f.path("vertices"))))
                    .collect::<Result<Vec<_>>>()?;
                ShapeSpec::ZigzagTube {
                    vertices,
                    radius: positive(f.f64("radius")?, f.path("radius"))?,
                }
            }
            other => {
                return Err(Error::validation(
                    f.path("kind"),
                    format!("unknown domain kind `{other}`"),
                ))
            }
        };
        Ok(DomainSpec { name, shape })
    }

    pub fn build(&self) -> Result<Domain> {
        let rot = |r: &Option<Mat3>| r.unwrap_or_else(identity3);
        let d = match &self.shape {
            ShapeSpec::Ball {
                center,
                radius,
                rotation,
            } => Domain::build(
                None,
                Shape::Ball { dim: center.dim() },
                Similarity::new(*radius, rot(rotation), *center)?,
            ),
            ShapeSpec::PuncturedBall {
                center,
                radius,
                puncture,
                rotation,
            } => {
                if puncture.dim() != center.dim() {
                    return Err(Error::validation("puncture", "dimension mismatch"));
                }
                let frame = Similarity::new(*radius, rot(rotation), *center)?;
                let q = frame.invert(puncture);
                if q.norm() >= 1.0 {
                    return Err(Error::validation(
                        "puncture",
                        "must lie strictly inside the ball",
                    ));
                }
                Domain::build(
                    None,
                    Shape::PuncturedBall {
                        dim: center.dim(),
                        puncture: q,
                    },
                    frame,
                )
            }
            ShapeSpec::SlitDisk {
                center,
                radius,
                rotation,
            } => Domain::build(
                None,
                Shape::SlitDisk,
                Similarity::new(*radius, rot(rotation), *center)?,
            ),
            ShapeSpec::HalfPlane {
                dim,
                center,
                scale,
                rotation,
            } => Domain::build(
                None,
                Shape::HalfPlane { dim: *dim },
                Similarity::new(*scale, rot(rotation), *center)?,
            ),
            ShapeSpec::StraightTube {
                center,
                length,
                radius,
                rotation,
            } => {
                let base = Domain::straight_tube(center.dim(), *length, *radius)?;
                base.transformed(&Similarity::new(1.0, rot(rotation), *center)?)
            }
            ShapeSpec::ZigzagTube { vertices, radius } => {
                let geo = ZigzagGeometry::new(vertices.clone(), *radius)?;
                Domain::build(None, Shape::Zigzag(Arc::new(geo)), Similarity::identity(2))
            }
        };
        Ok(match &self.name {
            Some(n) => d.with_name(n.clone()),
            None => d,
        })
    }

    pub fn from_domain(d: &Domain) -> Result<Self> {
        let fr = d.frame();
        let rotation = if fr.is_rotation_identity() {
            None
        } else {
            Some(fr.rot)
        };
        let shape = match d.shape() {
            Shape::Ball { .. } => ShapeSpec::Ball {
                center: fr.shift,
                radius: fr.scale,
                rotation,
            },
            Shape::PuncturedBall { puncture, .. } => ShapeSpec::PuncturedBall {
                center: fr.shift,
                radius: fr.scale,
                puncture: fr.apply(puncture),
                rotation,
            },
            Shape::SlitDisk => ShapeSpec::SlitDisk {
                center: fr.shift,
                radius: fr.scale,
                rotation,
            },
            Shape::HalfPlane { dim } => ShapeSpec::HalfPlane {
                dim: *dim,
                center: fr.shift,
                scale: fr.scale,
                rotation,
            },
            Shape::StraightTube { length, radius, .. } => ShapeSpec::StraightTube {
                center: fr.shift,
                length: length * fr.scale,
                radius: radius * fr.scale,
                rotation,
            },
            Shape::Zigzag(z) => ShapeSpec::ZigzagTube {
                vertices: z.vertices().iter().map(|v| fr.apply(v)).collect(),
                radius: z.radius() * fr.scale,
            },
            Shape::Image(_) => {
                return Err(Error::validation(
                    "kind",
                    "image domains have no document form",
                ))
            }
        };
        let name = (d.name() != d.kind().as_str()).then(|| d.name().to_string());
        Ok(DomainSpec { name, shape })
    }

    pub fn to_value(&self) -> Value {
        let mut v = match &self.shape {
            ShapeSpec::Ball {
                center,
                radius,
                rotation,
            } => with_rotation(
                json!({"kind": "ball", "center": center, "radius": radius}),
                rotation,
                center.dim(),
            ),
            ShapeSpec::PuncturedBall {
                center,
                radius,
                puncture,
                rotation,
            } => with_rotation(
                json!({"kind": "punctured_ball", "center": center, "radius": radius, "puncture": puncture}),
                rotation,
                center.dim(),
            ),
            ShapeSpec::SlitDisk {
                center,
                radius,
                rotation,
            } => with_rotation(
                json!({"kind": "slit_disk", "center": center, "radius": radius}),
                rotation,
                2,
            ),
            ShapeSpec::HalfPlane {
                dim,
                center,
                scale,
                rotation,
            } => with_rotation(
                json!({"kind": "half_plane", "dim": dim, "center": center, "scale": scale}),
                rotation,
                *dim,
            ),
            ShapeSpec::StraightTube {
                center,
                length,
                radius,
                rotation,
            } => with_rotation(
                json!({"kind": "straight_tube", "dim": center.dim(), "center": center, "length": length, "radius": radius}),
                rotation,
                center.dim(),
            ),
            ShapeSpec::ZigzagTube { vertices, radius } => {
                json!({"kind": "zigzag_tube", "vertices": vertices, "radius": radius})
            }
        };
        if let (Some(n), Some(obj)) = (&self.name, v.as_object_mut()) {
            obj.insert("name".into(), Value::String(n.clone()));
        }
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("spec values serialize")
    }
}

fn with_rotation(mut v: Value, rotation: &Option<Mat3>, dim: usize) -> Value {
    if let (Some(r), Some(obj)) = (rotation, v.as_object_mut()) {
        obj.insert("rotation".into(), json!(rotation_rows(r, dim)));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainKind;

    #[test]
    fn parses_examples() {
        let d = Domain::from_json(r#"{"kind":"ball","center":[0,0],"radius":1}"#).unwrap();
        assert_eq!(d.kind(), DomainKind::Ball);
        assert_eq!(d.dist_to_boundary(&Point::new2(0.0, 0.0)).unwrap(), 1.0);
        let s = Domain::from_json(r#"{"kind":"slit_disk"}"#).unwrap();
        assert_eq!(s.kind(), DomainKind::SlitDisk);
    }

    #[test]
    fn zigzag_radius_violation_names_field() {
        let err = Domain::from_json(r#"{"kind":"zigzag_tube","vertices":[[0,0],[1,0]],"radius":0.5}"#)
            .unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "radius"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn errors_carry_field_paths() {
        let err = Domain::from_json(r#"{"kind":"zigzag_tube","vertices":[[0,0],[1]],"radius":0.05}"#)
            .unwrap_err();
        assert!(err.to_string().contains("vertices[1]"), "{err}");
        let err = Domain::from_json(r#"{"kind":"ball","center":[0,0],"radius":1,"colour":3}"#)
            .unwrap_err();
        assert!(err.to_string().contains("colour"));
        let err = Domain::from_json(r#"{"kind":"torus"}"#).unwrap_err();
        assert!(err.to_string().contains("torus"));
        assert!(matches!(
            Domain::from_json("{not json"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn roundtrip_every_kind() {
        let docs = [
            r#"{"kind":"ball","center":[1,2],"radius":3}"#,
            r#"{"kind":"ball","center":[0,0,0],"radius":1,"name":"b3"}"#,
            r#"{"kind":"punctured_ball","center":[0,0],"radius":1,"puncture":[0.5,0]}"#,
            r#"{"kind":"slit_disk","rotation":[[0,-1],[1,0]]}"#,
            r#"{"kind":"half_plane","dim":3}"#,
            r#"{"kind":"straight_tube","length":4,"radius":0.05}"#,
            r#"{"kind":"zigzag_tube","vertices":[[0,0],[1,0],[1,1]],"radius":0.05}"#,
        ];
        for doc in docs {
            let d = Domain::from_json(doc).unwrap();
            let again = Domain::from_json(&d.to_spec().unwrap().to_json()).unwrap();
            assert_eq!(d.to_spec().unwrap(), again.to_spec().unwrap(), "{doc}");
            assert_eq!(d.id(), again.id(), "{doc}");
            assert_eq!(d.name(), again.name());
        }
    }
}
