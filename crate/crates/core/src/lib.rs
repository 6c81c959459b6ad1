//! Simulation-optimization of single-echelon inventory policies.
//!
//! The crate simulates a year of daily inventory dynamics under a
//! periodic-review `(p, Q)` or continuous-review `(r, Q)` replenishment rule,
//! replicates those years with Monte Carlo demand streams, and searches the
//! `(r, Q)` plane for the most profitable policy with either an exhaustive
//! grid or Gaussian-process Bayesian optimization.
//!
//! Module map:
//!
//! - [`domain`]: product economics, demand statistics, policies, cost accounting.
//! - [`demand`]: estimation from history and the gated demand samplers.
//! - [`policy`]: lead-time demand, safety stock, order-up-to and reorder levels.
//! - [`engine`]: the 365-day simulation loop.
//! - [`montecarlo`]: seeded, parallel replication with common random numbers.
//! - [`diagnostics`]: running mean, batch means, standard error, autocorrelation.
//! - [`optimize`]: grid search and Bayesian optimization over `(r, Q)`.
//! - [`config`] and [`report`]: file formats used by the command-line tool.

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod demand;
pub mod diagnostics;
pub mod domain;
pub mod engine;
mod error;
pub mod montecarlo;
pub mod optimize;
pub mod policy;
pub mod report;
mod rng;

pub use error::{Error, Result};
pub use rng::{mix_seed, replication_seed};

/// Days in the simulated year.
pub const DAYS_PER_YEAR: usize = 365;
