//! Bearing-only target search with a Dubins vehicle.
//!
//! A vehicle moving at constant forward speed estimates an unknown static
//! target position from noisy bearing angles (recursive pseudo-linear least
//! squares, with or without GPS) and steers by the closed-form solution of a
//! normalized bi-objective optimization that trades estimation quality
//! against approach speed.
//!
//! Module layout mirrors the data flow: [`geometry`] fixes the angle and
//! frame conventions, [`vehicle`] holds the discrete kinematics and the
//! turn-rate recovery, [`sensing`] produces reproducible noisy bearings,
//! [`estimation`] runs the least-square target estimators, [`optimizer`]
//! solves for the optimal radial speed, [`controller`] fuses the two under
//! certainty equivalence, and [`simulator`] closes the loop and records
//! traces.

pub mod controller;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod optimizer;
pub mod sensing;
pub mod simulator;
pub mod vehicle;

pub use error::Error;
