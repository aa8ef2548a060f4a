//! Heuristic samplers driven by a simulated spin-update clock.
//!
//! Every solver charges one nanosecond per attempted single-spin update;
//! sample timestamps come from that clock, never from wall time.

mod anneal;
mod icm;
mod replica;
mod spec;
mod tempering;
mod tuning;

pub use anneal::{geometric_betas, simulated_annealing, SaParams};
pub use icm::icm_move;
pub use replica::{metropolis_sweep, Replica, SpinUpdateClock};
pub use spec::{LadderSpec, PreparedSolver, PtParams, SolverKind, SolverSpec};
pub use tempering::{
    measure_exchange_rates, run_pt, run_pt_icm, run_pt_with_stats, IcmRungs, PtConfig, PtStats, TemperatureLadder,
};
pub use tuning::{tune_temperatures, tune_temperatures_with, TuneOptions, TunedLadder};
