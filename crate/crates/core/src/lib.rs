//! Certified bounds for the Harnack distance between points of a bounded
//! domain in `R^d`.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: domains, distance-to-complement, hulls and the
//!   Lipschitz segment certificate used everywhere else.
//! - [`grid`]: cell-centred lattice discretisations of a domain.
//! - [`exact`]: the closed-form ball value, the disk oracle and lower bounds
//!   obtained from enclosing balls and Poisson kernels.
//! - [`eac`]: entropy of linear connectivity, hull bounds and ball chains.
//! - [`separation`]: separation exponents, the pair/chain/set upper bounds
//!   and the hop-limited minimax solver.
//!
//! Every upper bound returned here is an upper bound on the true Harnack
//! distance, and every lower bound is a lower bound; approximations are
//! always made in the conservative direction.

pub mod eac;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod grid;
pub mod separation;
pub mod serde_num;

pub use error::{HarnackError, Result};
pub use geometry::{Domain, HullKind, Point, PointSet, Shape};
