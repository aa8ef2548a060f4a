//! Benchmarking toolkit for Ising spin-glass heuristics based on solution
//! diversity.
//!
//! The crate is organised bottom-up:
//!
//! * [`ising`] holds problems, bit-packed spin configurations, sample sets,
//!   gauge transformations and the file formats.
//! * [`topology`] builds Chimera graphs and the RAN1 / AC3 / DCL instance
//!   classes.
//! * [`solvers`] implements simulated annealing, parallel tempering and
//!   parallel tempering with Houdayer cluster moves, all charged against a
//!   spin-update clock (1 ns per single-spin update).
//! * [`diversity`] computes distance graphs and bounds on their independence
//!   number.
//! * [`metrics`] turns sample streams into diversity curves, success
//!   probabilities and time-to-diversity values.
//! * [`harness`] orchestrates experiments and writes results.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diversity;
pub mod error;
pub mod harness;
pub mod ising;
pub mod metrics;
pub mod rng;
pub mod solvers;
pub mod topology;

pub use error::{Error, Result};
pub use ising::{Gauge, IsingProblem, Sample, SampleSet, SpinConfiguration};

/// Version string written into every persisted file.
pub const FORMAT_VERSION: &str = "1";

/// Toolkit version recorded in result records.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
