//! Adaptive first-order methods for convex problems that are only *relatively*
//! Lipschitz or *relatively* smooth, i.e. whose regularity is measured by a
//! Bregman divergence instead of the Euclidean norm.
//!
//! The crate is organised bottom-up:
//!
//! - [`bregman`]: distance-generating functions and their divergences.
//! - [`oracles`]: objectives, monotone operators, feasible sets and the three
//!   seeded benchmark families (intersection of ellipsoids, SVM saddle point,
//!   relatively strongly convex quartic).
//! - [`mirror_step`]: exact solvers for `argmin <v,x> + L V(x, x_k)`.
//! - [`solvers`]: adaptive and universal mirror-descent methods with
//!   backtracking on `L` (and `delta`), plus their accuracy certificates.
//! - [`constrained`]: switching mirror descent for one functional constraint
//!   and its restart wrapper for relatively strongly convex problems.
//! - [`bench`]: experiment harness that writes checkpoint tables.
//!
//! Vectors are `nalgebra::DVector<f64>` throughout.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bregman;
pub mod constrained;
pub mod error;
pub mod mirror_step;
pub mod oracles;
pub mod solvers;
mod sum;

pub use bregman::{ProxKind, ProxSetup};
pub use error::{Error, Result};
pub use oracles::{FeasibleSet, ObjectiveOracle, OperatorOracle, SmoothnessDescriptor};
pub use solvers::{RunConfig, RunReport};

pub use nalgebra::{DMatrix, DVector};
