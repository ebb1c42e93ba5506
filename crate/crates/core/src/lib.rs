//! Annealing redescending M-estimators.
//!
//! The weight of an observation is the posterior probability that it is an
//! inlier under a two-component model whose outlier density is left
//! unspecified and replaced by the inlier density evaluated at the cutoff:
//!
//! ```text
//! w(r; c, T) = f(r/√T) / (f(r/√T) + f(c/√T))
//! ```
//!
//! Lowering the temperature `T` along a schedule (deterministic annealing)
//! makes the iteratively reweighted estimate independent of its starting
//! point; as `T → 0` the N-type estimator becomes the skipped mean.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches files
//! or the command line lives in the companion `redescend` crate.

#![no_std]

extern crate alloc;

mod error;
mod linalg;
mod math;

pub mod demo;
pub mod influence;
pub mod irls;
pub mod kernels;
pub mod quadrature;
pub mod scale;
pub mod tailindex;
pub mod vertex;

pub use error::{Error, Result};
pub use influence::{lambert_w0, InfluenceProfile};
pub use irls::{AnnealingSchedule, FitResult, IrlsConfig};
pub use kernels::{EstimatorKernel, KernelKind, KernelValue};
pub use linalg::Matrix;
pub use scale::ScaleEstimate;
