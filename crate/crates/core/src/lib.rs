//! Numerical toolkit for the quasihyperbolic metric.
//!
//! * [`domain`]: concrete planar and 3D domains with exact boundary distances.
//! * [`metric`]: quasihyperbolic length, the j-metric, graph upper bounds for
//!   the quasihyperbolic distance, near-geodesics and sphere-stepping chains.
//! * [`maps`]: homeomorphisms under test (similarities, radial stretches, a
//!   tube straightener).
//! * [`checks`]: sampled estimators and verdicts for map and domain classes.
//! * [`experiments`]: scripted tables for the worked examples.

pub mod checks;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod geom;
pub mod io;
pub mod maps;
pub mod metric;

pub use domain::{Domain, DomainKind, DomainSpec};
pub use error::{Error, Result};
pub use geom::{Point, Similarity};
pub use maps::{MapSpec, MapUnderTest, PointMap};
pub use metric::{Estimator, MetricEstimate, Path};
