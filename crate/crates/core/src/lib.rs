//! Exact solution-space analysis for correlation clustering on complete
//! signed graphs.
//!
//! The library finds the minimum total weight of frustrated pairs (negative
//! pairs kept together plus positive pairs split apart), enumerates every
//! partition attaining it, and then studies that optimal set as a whole:
//! pairwise variation-of-information distances, medoid clustering into
//! solution classes, and the stable cores that all solutions of a class
//! agree on.
//!
//! Modules:
//! - [`graph`], [`partition`], [`comembership`]: instance and solution types.
//! - [`generator`]: seeded random instances with a planted structure.
//! - [`solver`]: exact branch-and-bound optimum and full enumeration.
//! - [`metrics`]: partition entropy, variation of information, distance
//!   matrices.
//! - [`clustering`]: k-medoids over solution distances with silhouette-based
//!   model selection and a structure verdict.
//! - [`coreparts`]: consensus counts and largest stable cores.
//! - [`io`]: plain-text and JSON artifact formats.
//! - [`pipeline`]: generate, solve, analyze and persist in one call, plus
//!   full experiment grids.

pub mod clustering;
pub mod comembership;
pub mod coreparts;
pub mod error;
pub mod generator;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod partition;
pub mod pipeline;
pub mod solver;

pub use error::{CcError, Result};
pub use graph::SignedGraph;
pub use partition::Partition;
