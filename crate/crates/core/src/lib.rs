//! Resolvents of sums of maximally monotone operators.
//!
//! Operators are known only through their parametrized resolvent
//! `(gamma, x) -> J_{gamma A}(x)`. On top of that abstraction the crate
//! provides:
//!
//! * [`operator`]: concrete operators (normal cones of balls and affine
//!   subspaces, quadratic and l1 subdifferentials) and the resolvent calculus
//!   (scaling, inner perturbation, beta-strengthening, modified reflections).
//! * [`splitting`]: the averaged alternating modified reflections (AAMR)
//!   splitting iteration for `J_{A+B}(q)`, a Douglas-Rachford baseline and the
//!   best-approximation driver.
//! * [`parallel`]: product-space machinery and the two parallel AAMR variants
//!   for `J_{A_1 + ... + A_r}(q)`.
//! * [`oracle`]: independent reference solvers (Dykstra projections and a
//!   high-accuracy Douglas-Rachford reference) used for verification.
//!
//! The crate is `no_std` with `alloc`. The `std` feature (on by default) adds
//! threaded block dispatch to the parallel solvers.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

mod error;
mod iterate;
pub mod operator;
pub mod oracle;
pub mod parallel;
pub mod params;
pub mod sets;
pub mod splitting;
pub mod trace;
mod vector;

pub use error::{Error, Result};
pub use operator::MonotoneOperator;
pub use params::{IterationParams, Relaxation, StopRule, Stopping, TraceMode};
pub use sets::ConvexSet;
pub use trace::{RunTrace, StepRecord};
pub use vector::Vector;
