//! Connectivity and quality metrics for 1-dimensional ad hoc networks with
//! uniformly random node placement.
//!
//! `n` nodes with radio range `r` are dropped uniformly on a segment of
//! length `l`; after scaling, everything depends on `(n, rho = r/l)` alone.
//! The crate computes, for this model:
//!
//! * exact probabilities and quality-parameter expectations in
//!   arbitrary-precision rational arithmetic ([`exact`]), under periodic
//!   boundary conditions;
//! * closed-form large-`n` limits in the `eta = n*rho - ln n` and
//!   `nu = n*rho` scaling regimes ([`asym`]);
//! * two-sided exact bounds transferring periodic results to the plain
//!   interval ([`bounds`]);
//! * the varying-node-number model where devices are on with probability
//!   `p` ([`varying`]);
//! * a seeded, reproducible, parallel Monte Carlo evaluator for everything
//!   above ([`mc`]);
//! * inverse design questions such as "how many nodes for 99% coverage"
//!   ([`solve`]).
//!
//! The `manetq` binary ([`cli`]) exposes all of it on the command line.

pub mod asym;
pub mod bounds;
pub mod cli;
mod error;
pub mod exact;
pub mod mc;
pub mod params;
pub mod solve;
pub mod varying;

pub use error::{Error, Result};
pub use exact::{ExactProb, MetricKind};
pub use params::{ExactRational, PhysicalParams, SystemParams};
