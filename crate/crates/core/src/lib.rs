//! Simulation of non-intersecting line ensembles and their edge limits.
//!
//! The crate covers Brownian bridges on grids, lattice walk systems with
//! flip dynamics and monotone couplings, Brownian Gibbs resampling,
//! concave majorants and stopping domains, geometric last passage
//! percolation, and a tridiagonal random-matrix sampler for Tracy-Widom
//! reference statistics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod bridge;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod lpp;
pub mod parallel;
pub mod resample;
pub mod rmt;
pub mod rng;
pub mod stats;

pub use boundary::BoundaryData;
pub use bridge::GridPath;
pub use ensemble::LineEnsemble;
pub use error::{Error, Result};
pub use lattice::{FlipEvent, LatticeBridgeSystem};
pub use rng::RngSeed;
