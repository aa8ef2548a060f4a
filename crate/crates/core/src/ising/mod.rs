//! Problems, spin configurations, samples and gauge transformations.

mod gauge;
pub mod io;
mod problem;
mod sample;
mod spins;

pub use gauge::Gauge;
pub use problem::{Coupling, IsingProblem};
pub use sample::{Sample, SampleSet};
pub use spins::SpinConfiguration;
