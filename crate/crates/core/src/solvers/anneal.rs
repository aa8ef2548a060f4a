use serde::{Deserialize, Serialize};

use super::replica::{metropolis_sweep, Replica, SpinUpdateClock};
use crate::error::{Error, Result};
use crate::ising::{IsingProblem, Sample, SampleSet};
use crate::rng::stream_rng;

/// Simulated-annealing parameters as stored in solver parameter files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaParams {
    /// Inverse temperature of each sweep, non-decreasing.
    pub schedule: Vec<f64>,
    pub num_reads: usize,
}

impl SaParams {
    /// `sweeps` betas spaced geometrically from `beta_min` to `beta_max`.
    pub fn geometric(beta_min: f64, beta_max: f64, sweeps: usize, num_reads: usize) -> Self {
        Self {
            schedule: geometric_betas(beta_min, beta_max, sweeps),
            num_reads,
        }
    }
}

pub fn geometric_betas(beta_min: f64, beta_max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![beta_max],
        _ => {
            let ratio = (beta_max / beta_min).powf(1.0 / (count - 1) as f64);
            (0..count)
                .map(|k| if k + 1 == count { beta_max } else { beta_min * ratio.powi(k as i32) })
                .collect()
        }
    }
}

/// `num_reads` independent anneals from random starts, one sweep per
/// schedule entry. Each read emits its final state; reads run back to back
/// on one clock.
pub fn simulated_annealing(problem: &IsingProblem, schedule: &[f64], num_reads: usize, seed: u64) -> Result<SampleSet> {
    if schedule.is_empty() {
        return Err(Error::invalid("annealing schedule is empty"));
    }
    if schedule.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
        return Err(Error::invalid("annealing betas must be finite and non-negative"));
    }
    if schedule.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("annealing schedule must be non-decreasing"));
    }
    let mut set = SampleSet::for_problem(problem);
    let mut clock = SpinUpdateClock::new();
    for read in 0..num_reads {
        let mut rng = stream_rng(seed, read as u64);
        let mut replica = Replica::random(problem, &mut rng);
        for &beta in schedule {
            metropolis_sweep(problem, &mut replica, beta, &mut rng, &mut clock);
        }
        set.samples.push(Sample {
            config: replica.config(),
            energy: replica.energy(),
            time_ns: clock.elapsed_ns(),
            run_index: read as u32,
        });
    }
    Ok(set)
}
