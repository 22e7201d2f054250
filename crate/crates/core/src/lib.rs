//! Ribbon-graph analysis and amplitude evaluation for the φ⋆⁴ model on
//! four-dimensional Moyal space with the `1/p²`-modified propagator
//!
//! ```text
//!     C(p) = 1 / (p² + μ² + a / (θ² p²))
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: φ⋆⁴ ribbon graphs, the line-oriented text format and the
//!   built-in catalog.
//! - [`topology`]: face tracing, genus, broken faces and the
//!   planar-regular / planar-irregular / non-planar classification.
//! - [`rosette`]: spanning trees, contraction to a rosette, the
//!   intersection matrix and Moyal phases.
//! - [`multiscale`]: model parameters, the sliced propagator, scale
//!   attributions, high subgraphs, momentum routing and power counting.
//! - [`amplitude`]: numerical evaluation of low-order amplitudes
//!   (Bessel-reduced tadpoles, hyperspherically reduced bubbles, a
//!   closed-form Gaussian Schwinger evaluator and a Monte Carlo oracle).
//! - [`fit`]: divergence extraction from amplitude scans and the
//!   classification table.
//! - [`cli`]: the command implementations behind the `ncphi4` binary.

pub mod amplitude;
pub mod cli;
pub mod fit;
pub mod graph;
pub mod multiscale;
pub mod rosette;
pub mod topology;
pub mod vec4;

pub use amplitude::{AmplitudeSample, CutoffSpec, Method};
pub use graph::{catalog_get, parse_graph, GraphDecl, GraphError, RibbonGraph};
pub use multiscale::{ModelParams, ScaleAttribution};
pub use rosette::{Rosette, SpanningTree};
pub use topology::{DivergenceClass, GraphClass, TopologyReport};
pub use vec4::{ThetaMatrix, Vec4};
