//! Fractional Poisson processes (fPp).
//!
//! The fPp is a renewal counting process whose waiting-time survival function
//! is the Mittag-Leffler function `E_nu(-mu t^nu)`; it reduces to the ordinary
//! Poisson process at `nu = 1`. This crate provides:
//!
//! - [`specfun`]: Mittag-Leffler families, `erfc`, log-gamma series machinery.
//! - [`stable`]: one-sided alpha-stable laws (exact sampling, density, moments).
//! - [`fpp`]: interarrival/count distributions, exact path simulation, and the
//!   scaling-limit law of `N(t) / E N(t)`.
//! - [`estimate`]: method-of-moments estimation of `(nu, mu)` from interarrival
//!   data with asymptotic and bootstrap confidence intervals.
//! - [`harness`]: a deterministic Monte Carlo experiment engine producing
//!   accuracy and confidence-interval reports.
//! - [`series`]: event-series containers and their on-disk formats.

pub mod error;
pub mod estimate;
pub mod fpp;
pub mod harness;
mod quad;
pub mod rng;
pub mod series;
pub mod specfun;
pub mod stable;

pub use error::{Error, Result};
pub use rng::UniformSource;
