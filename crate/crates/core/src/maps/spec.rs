//! JSON documents describing maps, under the key `"map"`.
//!
//! ```json
//! {"map": {"kind": "identity", "source": {"kind": "slit_disk"}}}
//! {"map": {"kind": "similarity", "scale": 3, "rotation": [[0, -1], [1, 0]],
//!          "translation": [1, 0], "source": {"kind": "ball", "center": [0, 0], "radius": 1}}}
//! {"map": {"kind": "radial_stretch", "exponent": 2}}
//! {"map": {"kind": "zigzag_straightener", "segments": 20, "radius": 0.05, "bend_degrees": 90}}
//! ```
//!
//! `source` defaults to the unit disk; the straightener builds its own
//! domains and also accepts `segment_length` and `box_half_width`.

use serde_json::{json, Value};

use super::{identity, radial_stretch, similarity, MapUnderTest, StraightenerParams, ZigzagStraightener};
use crate::domain::{Domain, DomainSpec, Fields};
use crate::error::{Error, Result};
use crate::geom::{identity3, rotation_rows, Mat3, Point};

#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    Identity {
        source: DomainSpec,
    },
    Similarity {
        scale: f64,
        rotation: Option<Mat3>,
        translation: Point,
        source: DomainSpec,
    },
    RadialStretch {
        exponent: f64,
        source: DomainSpec,
    },
    ZigzagStraightener(StraightenerParams),
}

fn default_source() -> DomainSpec {
    DomainSpec::from_domain(&Domain::ball(Point::new2(0.0, 0.0), 1.0).expect("unit disk"))
        .expect("unit disk has a spec")
}

impl MapSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        match v.get("map") {
            Some(inner) => Self::from_value(inner, "map"),
            None => Err(Error::validation("map", "missing required field")),
        }
    }

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
        let source = || -> Result<DomainSpec> {
            match obj.get("source") {
                Some(s) => DomainSpec::from_value(s, &f.path("source")),
                None => Ok(default_source()),
            }
        };
        match kind {
            "identity" => {
                f.allow_only(&["source"])?;
                Ok(MapSpec::Identity { source: source()? })
            }
            "similarity" => {
                f.allow_only(&["scale", "rotation", "translation", "source"])?;
                let source = source()?;
                let dim = source.build()?.dim();
                let scale = f.f64("scale")?;
                if !(scale > 0.0) {
                    return Err(Error::validation(f.path("scale"), "must be positive"));
                }
                let translation = f.opt_point("translation")?.unwrap_or(Point::origin(dim));
                Ok(MapSpec::Similarity {
                    scale,
                    rotation: f.rotation(dim)?,
                    translation,
                    source,
                })
            }
            "radial_stretch" => {
                f.allow_only(&["exponent", "source"])?;
                let exponent = f.f64("exponent")?;
                if !(exponent > 0.0) {
                    return Err(Error::validation(f.path("exponent"), "must be positive"));
                }
                Ok(MapSpec::RadialStretch {
                    exponent,
                    source: source()?,
                })
            }
            "zigzag_straightener" => {
                f.allow_only(&["segments", "radius", "bend_degrees", "segment_length", "box_half_width"])?;
                let segments = f.f64("segments")?;
                if segments < 1.0 || segments.fract() != 0.0 {
                    return Err(Error::validation(f.path("segments"), "expected a positive integer"));
                }
                let mut p = StraightenerParams::new(
                    segments as usize,
                    f.f64("radius")?,
                    f.f64("bend_degrees")?.to_radians(),
                );
                if let Some(l) = f.opt_f64("segment_length")? {
                    p.segment_length = l;
                }
                p.box_half_width = f.opt_f64("box_half_width")?;
                Ok(MapSpec::ZigzagStraightener(p))
            }
            other => Err(Error::validation(f.path("kind"), format!("unknown map kind `{other}`"))),
        }
    }

    pub fn build(&self) -> Result<MapUnderTest> {
        match self {
            MapSpec::Identity { source } => Ok(identity(&source.build()?)),
            MapSpec::Similarity {
                scale,
                rotation,
                translation,
                source,
            } => similarity(
                *scale,
                rotation.unwrap_or_else(identity3),
                *translation,
                &source.build()?,
            ),
            MapSpec::RadialStretch { exponent, source } => radial_stretch(*exponent, &source.build()?),
            MapSpec::ZigzagStraightener(p) => ZigzagStraightener::build(p),
        }
    }

    pub fn to_value(&self) -> Value {
        let inner = match self {
            MapSpec::Identity { source } => json!({"kind": "identity", "source": source.to_value()}),
            MapSpec::Similarity {
                scale,
                rotation,
                translation,
                source,
            } => {
                let mut v = json!({
                    "kind": "similarity",
                    "scale": scale,
                    "translation": translation,
                    "source": source.to_value(),
                });
                if let Some(r) = rotation {
                    v["rotation"] = json!(rotation_rows(r, translation.dim()));
                }
                v
            }
            MapSpec::RadialStretch { exponent, source } => {
                json!({"kind": "radial_stretch", "exponent": exponent, "source": source.to_value()})
            }
            MapSpec::ZigzagStraightener(p) => {
                let mut v = json!({
                    "kind": "zigzag_straightener",
                    "segments": p.segments,
                    "radius": p.radius,
                    "bend_degrees": p.bend.to_degrees(),
                    "segment_length": p.segment_length,
                });
                if let Some(b) = p.box_half_width {
                    v["box_half_width"] = json!(b);
                }
                v
            }
        };
        json!({ "map": inner })
    }
}

pub fn map_from_json(text: &str) -> Result<MapUnderTest> {
    MapSpec::parse(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let docs = [
            r#"{"map": {"kind": "identity", "source": {"kind": "slit_disk"}}}"#,
            r#"{"map": {"kind": "similarity", "scale": 3, "rotation": [[0, -1], [1, 0]], "translation": [1, 0]}}"#,
            r#"{"map": {"kind": "radial_stretch", "exponent": 2}}"#,
            r#"{"map": {"kind": "zigzag_straightener", "segments": 4, "radius": 0.05, "bend_degrees": 90}}"#,
        ];
        for d in docs {
            let spec = MapSpec::parse(d).unwrap();
            let again = MapSpec::from_value(&spec.to_value()["map"], "map").unwrap();
            assert_eq!(spec, again);
            spec.build().unwrap();
        }
    }

    #[test]
    fn errors_name_fields() {
        let e = MapSpec::parse(r#"{"map": {"kind": "radial_stretch", "exponent": -1}}"#).unwrap_err();
        assert!(e.to_string().contains("map.exponent"), "{e}");
        let e = MapSpec::parse(r#"{"map": {"kind": "twist"}}"#).unwrap_err();
        assert!(e.to_string().contains("map.kind"), "{e}");
        let e = MapSpec::parse(r#"{"map": {"kind": "identity", "source": {"kind": "ball", "center": [0, 0]}}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("map.source.radius"), "{e}");
    }
}
