//! Graph embeddings into heterogeneous manifolds `M_h x R`.
//!
//! `M_h` is a product of space forms (Euclidean, spherical, hyperbolic) and
//! `R` is a single radial coordinate of a rotationally symmetric 3-manifold
//! with warping function `phi(r) = alpha * atan(r / alpha)`. The radial
//! factor adds position-dependent scalar curvature, which lets an embedding
//! match node-wise Forman curvature of the input graph as well as its
//! pairwise hop distances.
//!
//! Modules:
//!
//! - [`graph`]: adjacency, hop distances, triangles, Forman curvature.
//! - [`manifold`]: distances, exponential maps, gradients and curvature of
//!   the embedding spaces.
//! - [`optim`]: losses, analytic gradients and the Riemannian SGD loop.
//! - [`metrics`]: distortion, mAP, curvature/triangle distortion, volumes.
//! - [`reconstruct`]: threshold graphs, triangle estimation, curvature-based
//!   correction.
//! - [`randgraph`]: random geometric graphs on `H^3` and `H^3 x R`.
//! - [`io`]: embedding files, reports and CSV export.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod io;
pub mod manifold;
pub mod metrics;
pub mod optim;
pub mod randgraph;
pub mod reconstruct;

pub use error::{Error, Result};
pub use graph::{bfs_apsp, forman, DistanceMatrix, FormanSignal, Graph};
pub use manifold::{FactorKind, FactorSpec, ManifoldSpec, Point, TangentVector};
pub use optim::{train, Embedding, ShiftConstants, TrainConfig};

#[cfg(test)]
extern crate self as hetembed;
#[cfg(test)]
#[path = "../tests/common/mod.rs"]
mod common;
#[cfg(test)]
mod proptests;
