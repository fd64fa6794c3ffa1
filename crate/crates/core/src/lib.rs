//! Funk and Hilbert geometry of the probability simplex, plus the machinery to
//! compare its representation power against Euclidean, L1 and hyperbolic
//! geometries by embedding graph distance and random-walk similarity matrices.
//!
//! Module map:
//!
//! - [`geometry`]: closed-form Funk, Hilbert and Aitchison distances, the
//!   log-ratio isometry to the variation-norm space, log-sum-exp surrogates,
//!   coarse-graining and a cross-ratio oracle.
//! - [`manifolds`]: the five embedding geometries behind one unconstrained
//!   parametrization, with analytic (sub)gradients.
//! - [`graphs`]: seeded dataset generators, shortest paths and random-walk
//!   similarities.
//! - [`embed`]: stress and KL losses, mini-batch SGD with momentum and random
//!   hyperparameter search.
//! - [`bench`]: the experiment grid, resumable CSV results and summaries.
//! - [`render`]: raster distance fields and Voronoi diagrams on the 2-simplex.

pub mod bench;
pub mod embed;
mod error;
pub mod geometry;
pub mod graphs;
pub mod io;
pub mod manifolds;
pub mod render;
pub mod rng;

pub use error::{Error, Result};
