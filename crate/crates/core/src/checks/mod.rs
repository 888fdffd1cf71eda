//! Sampled estimators and verdicts for map classes and domain classes.
//!
//! Every checker works on an explicit sample. Where a definition compares two
//! metric quantities, the side being bounded uses a lower estimate and the
//! bounding side an upper estimate, so a reported violation is certified.

mod gauge;
mod maps;
mod sample;
mod uniform;

use std::collections::BTreeMap;

use serde::Serialize;

pub use gauge::{EmpiricalGauge, GAUGE_BINS};
pub use maps::{
    check_cqh, check_semisolid, check_solid, estimate_qh_constant, estimate_qs_eta, estimate_relative_theta,
    local_to_global_qh,
};
pub use sample::{sample_local_pairs, sample_pairs, sample_triples};
pub use uniform::{theorem_d_fit, uniformity_check, TheoremDFit};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::metric::{DEFAULT_EDGE_TOL, DEFAULT_LEVEL};

/// An ordered triple of distinct points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triple {
    pub x: Point,
    pub a: Point,
    pub b: Point,
}

impl Triple {
    pub fn new(x: Point, a: Point, b: Point) -> Result<Self> {
        if x == a || x == b || a == b {
            return Err(Error::validation("triple", "points must be pairwise distinct"));
        }
        Ok(Triple { x, a, b })
    }

    pub fn map(&self, f: impl Fn(&Point) -> Point) -> Result<Triple> {
        Triple::new(f(&self.x), f(&self.a), f(&self.b))
    }
}

/// `|a - x| / |b - x|`.
pub fn triple_ratio(t: &Triple) -> f64 {
    t.a.dist(&t.x) / t.b.dist(&t.x)
}

/// Resolution and tolerance shared by the checkers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CheckConfig {
    pub level: u32,
    pub seed: u64,
    pub tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            level: DEFAULT_LEVEL,
            seed: 0,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingManifest {
    pub seed: u64,
    pub level: u32,
    pub tol: f64,
    pub edge_tol: f64,
    pub pairs: usize,
    pub triples: usize,
    pub centers: usize,
}

impl SamplingManifest {
    pub fn new(cfg: &CheckConfig) -> Self {
        SamplingManifest {
            seed: cfg.seed,
            level: cfg.level,
            tol: cfg.tol,
            edge_tol: DEFAULT_EDGE_TOL,
            pairs: 0,
            triples: 0,
            centers: 0,
        }
    }
}

/// The pair or triple realizing a reported supremum.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub label: String,
    pub points: Vec<Point>,
    pub value: f64,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub subject: String,
    pub constants: BTreeMap<String, f64>,
    pub gauges: Vec<EmpiricalGauge>,
    pub worst_witness: Vec<Witness>,
    pub verdicts: BTreeMap<String, bool>,
    pub manifest: SamplingManifest,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: &str, subject: &str, cfg: &CheckConfig) -> Self {
        CheckReport {
            check: check.into(),
            subject: subject.into(),
            constants: BTreeMap::new(),
            gauges: Vec::new(),
            worst_witness: Vec::new(),
            verdicts: BTreeMap::new(),
            manifest: SamplingManifest::new(cfg),
            notes: Vec::new(),
        }
    }

    /// True when every verdict holds.
    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    pub fn witness(&self, label: &str) -> Option<&Witness> {
        self.worst_witness.iter().find(|w| w.label == label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_examples() {
        let p = Point::new2;
        let t = Triple::new(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)).unwrap();
        assert_eq!(triple_ratio(&t), 1.0);
        let t = Triple::new(p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.0)).unwrap();
        assert_eq!(triple_ratio(&t), 2.0);
        let s = Triple::new(t.x, t.b, t.a).unwrap();
        assert_eq!(triple_ratio(&t) * triple_ratio(&s), 1.0);
        assert!(Triple::new(p(0.0, 0.0), p(0.0, 0.0), p(1.0, 0.0)).is_err());
    }
}
