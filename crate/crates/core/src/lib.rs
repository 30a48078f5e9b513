//! Rank deficiency of random matrices with i.i.d. subgaussian entries.
//!
//! The crate estimates `P(rank(A) <= n - k)` for random integer matrices and
//! implements the geometric objects used to bound it: compressible and
//! incompressible vectors, almost orthogonal systems, least common
//! denominators, random rounding onto scaled lattices, and the closed-form
//! small-ball and net bounds (evaluated in log domain).
//!
//! Monte Carlo loops run on rayon when the `parallel` feature is enabled;
//! results are identical to sequential execution.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod lcd;
pub mod matrix;
pub mod par;
pub mod rng;
pub mod rounding;
pub mod stats;
mod util;

pub use dist::{Atom, DistributionSpec};
pub use error::{Error, Result};
pub use matrix::{IntMatrix, RealMatrix};
pub use par::Execution;
pub use rng::RngStream;

/// Version of this crate, recorded in run summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
