use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::icm::icm_move_unchecked;
use super::replica::{metropolis_sweep, Replica, SpinUpdateClock};
use crate::error::{Error, Result};
use crate::ising::{IsingProblem, Sample, SampleSet};
use crate::rng::{stream_rng, StreamRng};

/// Strictly increasing inverse temperatures, coldest last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TemperatureLadder {
    betas: Vec<f64>,
}

impl TemperatureLadder {
    pub fn new(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::invalid("temperature ladder is empty"));
        }
        if betas.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
            return Err(Error::invalid("ladder betas must be finite and non-negative"));
        }
        if betas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("ladder betas must be strictly increasing"));
        }
        Ok(Self { betas })
    }

    pub fn geometric(beta_min: f64, beta_max: f64, rungs: usize) -> Result<Self> {
        if rungs < 2 || !(beta_min > 0.0) || !(beta_max > beta_min) {
            return Err(Error::invalid("geometric ladder needs 0 < beta_min < beta_max and at least 2 rungs"));
        }
        Self::new(super::anneal::geometric_betas(beta_min, beta_max, rungs))
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }
}

impl TryFrom<Vec<f64>> for TemperatureLadder {
    type Error = Error;

    fn try_from(betas: Vec<f64>) -> Result<Self> {
        Self::new(betas)
    }
}

impl From<TemperatureLadder> for Vec<f64> {
    fn from(l: TemperatureLadder) -> Self {
        l.betas
    }
}

/// Which rungs receive cluster moves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IcmRungs {
    #[default]
    All,
    ColdestHalf,
}

fn one() -> usize {
    1
}

/// Parallel-tempering run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtConfig {
    pub ladder: TemperatureLadder,
    /// Independent PT instances, run one after another on the same clock.
    pub num_copies: usize,
    pub sweeps_between_samples: usize,
    #[serde(default)]
    pub icm_enabled: bool,
    #[serde(default)]
    pub icm_rungs: IcmRungs,
    #[serde(default = "one")]
    pub icm_moves_per_iteration: usize,
    /// Iterations per copy.
    pub max_sweeps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Stop before the clock would pass this many spin updates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_total_updates: Option<u64>,
    /// Stop once any replica reaches this energy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_energy: Option<f64>,
}

impl PtConfig {
    pub fn new(ladder: TemperatureLadder, seed: u64) -> Self {
        Self {
            ladder,
            num_copies: 1,
            sweeps_between_samples: 10,
            icm_enabled: false,
            icm_rungs: IcmRungs::All,
            icm_moves_per_iteration: 1,
            max_sweeps: 10_000,
            seed,
            max_total_updates: None,
            target_energy: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_copies == 0 {
            return Err(Error::invalid("num_copies must be at least 1"));
        }
        if self.sweeps_between_samples == 0 {
            return Err(Error::invalid("sweeps_between_samples must be at least 1"));
        }
        if self.icm_enabled && self.icm_moves_per_iteration == 0 {
            return Err(Error::invalid("icm_moves_per_iteration must be at least 1"));
        }
        Ok(())
    }

    /// Replicas per copy: one per rung, two with cluster moves.
    pub fn replicas_per_copy(&self) -> usize {
        self.ladder.len() * if self.icm_enabled { 2 } else { 1 }
    }

    fn icm_range(&self) -> Range<usize> {
        let rungs = self.ladder.len();
        match self.icm_rungs {
            IcmRungs::All => 0..rungs,
            IcmRungs::ColdestHalf => rungs / 2..rungs,
        }
    }
}

/// Counters gathered during a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PtStats {
    /// Per neighbouring rung pair `(k, k+1)`.
    pub exchange_attempts: Vec<u64>,
    pub exchange_accepts: Vec<u64>,
    /// Iterations executed, summed over copies.
    pub iterations: u64,
    pub cluster_moves: u64,
    pub reached_target: bool,
    pub total_updates: u64,
}

impl PtStats {
    pub fn exchange_rates(&self) -> Vec<f64> {
        self.exchange_attempts
            .iter()
            .zip(&self.exchange_accepts)
            .map(|(&n, &k)| if n == 0 { 0.0 } else { k as f64 / n as f64 })
            .collect()
    }
}

/// Plain parallel tempering; delegates to [`run_pt_icm`] when
/// `icm_enabled` is set.
pub fn run_pt(problem: &IsingProblem, config: &PtConfig) -> Result<SampleSet> {
    Ok(run_pt_with_stats(problem, config)?.0)
}

/// Parallel tempering with two replicas per rung and one Houdayer move per
/// icm rung per iteration, applied after the sweeps and before exchanges.
pub fn run_pt_icm(problem: &IsingProblem, config: &PtConfig) -> Result<SampleSet> {
    let mut config = config.clone();
    config.icm_enabled = true;
    Ok(run_pt_with_stats(problem, &config)?.0)
}

pub fn run_pt_with_stats(problem: &IsingProblem, config: &PtConfig) -> Result<(SampleSet, PtStats)> {
    run_tempering(problem, config, 0, true)
}

/// Neighbour exchange acceptance rates from a single-copy calibration run
/// of `burn_in + sweeps` iterations; only the last `sweeps` are counted.
pub fn measure_exchange_rates(
    problem: &IsingProblem,
    ladder: &TemperatureLadder,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut config = PtConfig::new(ladder.clone(), seed);
    config.max_sweeps = burn_in + sweeps;
    config.sweeps_between_samples = usize::MAX;
    Ok(run_tempering(problem, &config, burn_in, false)?.1.exchange_rates())
}

fn run_tempering(problem: &IsingProblem, config: &PtConfig, burn_in: usize, emit: bool) -> Result<(SampleSet, PtStats)> {
    config.validate()?;
    if config.icm_enabled && !problem.has_zero_field() {
        return Err(Error::Precondition("cluster moves require a zero-field problem".into()));
    }
    let betas = config.ladder.betas();
    let rungs = betas.len();
    let lanes = if config.icm_enabled { 2 } else { 1 };
    let per_iteration = (lanes * rungs * problem.num_spins()) as u64;
    let icm_range = config.icm_range();

    let mut set = SampleSet::for_problem(problem);
    let mut clock = SpinUpdateClock::new();
    let mut stats = PtStats {
        exchange_attempts: vec![0; rungs.saturating_sub(1)],
        exchange_accepts: vec![0; rungs.saturating_sub(1)],
        ..PtStats::default()
    };

    'copies: for copy in 0..config.num_copies {
        let mut rng = stream_rng(config.seed, copy as u64);
        let mut replicas: Vec<Vec<Replica>> = (0..lanes)
            .map(|_| (0..rungs).map(|_| Replica::random(problem, &mut rng)).collect())
            .collect();
        for it in 0..config.max_sweeps {
            if let Some(budget) = config.max_total_updates {
                if clock.total_updates() + per_iteration > budget {
                    break 'copies;
                }
            }
            for lane in replicas.iter_mut() {
                for (rung, replica) in lane.iter_mut().enumerate() {
                    metropolis_sweep(problem, replica, betas[rung], &mut rng, &mut clock);
                }
            }
            if config.icm_enabled {
                let (first, second) = replicas.split_at_mut(1);
                for rung in icm_range.clone() {
                    for _ in 0..config.icm_moves_per_iteration {
                        icm_move_unchecked(problem, &mut first[0][rung], &mut second[0][rung], &mut rng);
                        stats.cluster_moves += 1;
                    }
                }
            }
            let counting = it >= burn_in;
            for lane in replicas.iter_mut() {
                exchange(lane, betas, it % 2, &mut rng, counting.then_some(&mut stats));
            }
            stats.iterations += 1;

            if emit && (it + 1) % config.sweeps_between_samples == 0 {
                for rung in 0..rungs {
                    for lane in &replicas {
                        set.samples.push(Sample {
                            config: lane[rung].config(),
                            energy: lane[rung].energy(),
                            time_ns: clock.elapsed_ns(),
                            run_index: copy as u32,
                        });
                    }
                }
            }
            if let Some(target) = config.target_energy {
                if replicas.iter().flatten().any(|r| r.energy() <= target) {
                    stats.reached_target = true;
                    break 'copies;
                }
            }
        }
    }
    stats.total_updates = clock.total_updates();
    Ok((set, stats))
}

/// Attempts swaps between rungs `(k, k+1)` for every `k` of the given
/// parity, accepting with `min(1, exp(Δβ ΔE))`.
fn exchange(lane: &mut [Replica], betas: &[f64], parity: usize, rng: &mut StreamRng, mut stats: Option<&mut PtStats>) {
    let mut k = parity;
    while k + 1 < lane.len() {
        let log_ratio = (betas[k + 1] - betas[k]) * (lane[k + 1].energy() - lane[k].energy());
        let accept = log_ratio >= 0.0 || rng.gen::<f64>() < log_ratio.exp();
        if accept {
            lane.swap(k, k + 1);
        }
        if let Some(s) = stats.as_deref_mut() {
            s.exchange_attempts[k] += 1;
            s.exchange_accepts[k] += accept as u64;
        }
        k += 2;
    }
}
