//! Probabilistic collision detection for two-vehicle encounters.
//!
//! The crate is organized around the lifecycle of a collision alarm:
//!
//! * [`geometry`] — exact planar overlap tests between oriented vehicle
//!   footprints.
//! * [`curve`] — piecewise straight/arc paths for path-constrained vehicles.
//! * [`dynamics`] — motion models, Gaussian joint beliefs, sampling, and
//!   sigma points.
//! * [`alarms`] — the collision-probability estimators: Monte Carlo,
//!   expected-value, unscented-transform, and learned regression, plus
//!   time-to-collision estimation.
//! * [`mlp`] — the small feedforward regressor behind the learned alarm.
//! * [`bounds`] — closed-form alarm theory: optimal cutoffs, expected-cost
//!   ceilings, concentration bounds, and the sample-size/error curve.
//! * [`scenarios`] — randomized near-conflict episode generation for the
//!   left-turn and free-space bicycle settings.
//! * [`harness`] — benchmark orchestration: scoring alarms against a
//!   high-sample oracle and emitting CSV reports.
//!
//! All randomized operations take a `u64` seed and derive independent
//! counter-based substreams per work item ([`rng`]), so batch runs are
//! reproducible bit-for-bit regardless of thread count.

pub mod alarms;
pub mod bounds;
pub mod curve;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod mlp;
pub mod rng;
pub mod scenarios;

pub use error::{Error, Result};
