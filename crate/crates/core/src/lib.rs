//! Moderate and large deviations for i.i.d. sums, bounded-difference
//! martingales and random sums `S_nu = X_1 + ... + X_nu`.
//!
//! The crate is organised as four engines plus orchestration:
//!
//! * [`models`]: summand and index laws with exact CGFs and seeded samplers.
//! * [`rates`]: convex conjugates, infimal projections and the sup-composition
//!   that produce every rate function in the catalog.
//! * [`cumulants`]: analytic and empirical cumulants with the Bernstein,
//!   Statulevičius and index-cumulant condition checks.
//! * [`montecarlo`]: plain and exponentially tilted tail estimators with
//!   block-deterministic parallel streams.
//! * [`verify`]: JSON experiment configs, rate-comparison tables, limit-law
//!   checks and report emission.

// Negated float comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cumulants;
pub mod error;
pub mod interval;
pub mod models;
pub mod montecarlo;
pub mod rates;
pub mod rng;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use interval::Interval;
