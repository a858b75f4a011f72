//! Sequential and variational data assimilation over small dense systems.
//!
//! The crate is `no_std` and only needs `alloc`. It provides:
//!
//! - [`linalg`]: row-major [`Matrix`] / [`Vector`] values with the handful of
//!   factorizations the filters need (partial-pivot elimination, Cholesky).
//! - [`rng`]: a seeded, platform-independent Gaussian stream and
//!   multivariate normal sampling.
//! - [`ssmodel`]: linear continuous systems, forward-Euler discretization,
//!   truth simulation and synthetic observations.
//! - [`kalman`]: the classical Kalman filter with both covariance updates.
//! - [`enkf`]: the perturbed-observation ensemble Kalman filter.
//! - [`var3d`]: the 3D-Var cost, its minimizers and the Tikhonov form.
//! - [`metrics`]: error statistics against a known truth.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;

pub mod enkf;
pub mod kalman;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod ssmodel;
pub mod var3d;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use rng::RngStream;
