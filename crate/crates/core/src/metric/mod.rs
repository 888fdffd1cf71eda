//! Quasihyperbolic length, the j-metric, graph upper bounds for `k`, and
//! chains along paths.

mod chain;
mod estimator;
mod graph;
mod path;
mod quad;

pub use chain::{chain_decompose, lemma1_bound};
pub use estimator::{
    extract_neargeodesic, j_metric, k_lower, k_upper, neargeodesic_constant, refine_k, Estimator,
    Route, DEFAULT_EDGE_TOL, DEFAULT_LEVEL,
};
pub use graph::{GridGraph, CONNECTION_FACTOR};
pub use path::{qh_length, EstimateKind, MetricEstimate, Path};
pub use quad::{lipschitz_enclosure, Quadrature};
