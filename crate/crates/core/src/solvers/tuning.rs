use log::warn;

use super::tempering::{measure_exchange_rates, TemperatureLadder};
use crate::error::{Error, Result};
use crate::ising::IsingProblem;
use crate::rng::derive_seed;

/// Knobs for [`tune_temperatures_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct TuneOptions {
    pub beta_min: f64,
    pub beta_max: f64,
    pub initial_rungs: usize,
    pub max_rungs: usize,
    pub calibration_sweeps: usize,
    pub burn_in: usize,
    /// Allowed deviation of every neighbour rate from the target.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            beta_min: 0.1,
            beta_max: 5.0,
            initial_rungs: 8,
            max_rungs: 128,
            calibration_sweeps: 2000,
            burn_in: 200,
            tolerance: 0.1,
            max_iterations: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TunedLadder {
    pub ladder: TemperatureLadder,
    /// Measured neighbour exchange rates of `ladder`.
    pub rates: Vec<f64>,
    /// False when the iteration cap was hit; `ladder` is then the best seen.
    pub converged: bool,
    pub iterations: usize,
}

/// Tunes the ladder with default options.
pub fn tune_temperatures(problem: &IsingProblem, target_exchange_rate: f64, seed: u64) -> Result<TunedLadder> {
    tune_temperatures_with(problem, target_exchange_rate, seed, &TuneOptions::default())
}

/// Feedback tuning of the rung count and spacing between fixed endpoints.
///
/// Each iteration measures the neighbour exchange rates `a_k` and treats
/// `sqrt(-ln a_k)` as the length of gap `k`. Rungs are then re-placed so
/// that every gap has the length `sqrt(-ln target)`, interpolating the
/// cumulative length piecewise-linearly in β. Stops once every rate is
/// within `tolerance` of the target.
pub fn tune_temperatures_with(
    problem: &IsingProblem,
    target_exchange_rate: f64,
    seed: u64,
    options: &TuneOptions,
) -> Result<TunedLadder> {
    if !(target_exchange_rate > 0.0 && target_exchange_rate < 1.0) {
        return Err(Error::invalid(format!(
            "target exchange rate must lie in (0, 1), got {target_exchange_rate}"
        )));
    }
    let mut ladder = TemperatureLadder::geometric(options.beta_min, options.beta_max, options.initial_rungs.max(2))?;
    let mut best: Option<(f64, TunedLadder)> = None;
    let target_gap = (-target_exchange_rate.ln()).sqrt();

    for iteration in 0..options.max_iterations {
        let rates = measure_exchange_rates(
            problem,
            &ladder,
            options.calibration_sweeps,
            options.burn_in,
            derive_seed(seed, iteration as u64),
        )?;
        let deviation = rates.iter().map(|a| (a - target_exchange_rate).abs()).fold(0.0, f64::max);
        let candidate = TunedLadder {
            ladder: ladder.clone(),
            rates: rates.clone(),
            converged: deviation <= options.tolerance,
            iterations: iteration + 1,
        };
        if candidate.converged {
            return Ok(candidate);
        }
        if best.as_ref().is_none_or(|(d, _)| deviation < *d) {
            best = Some((deviation, candidate));
        }
        let next = respace(ladder.betas(), &rates, target_gap, options.max_rungs);
        if next == ladder.betas() {
            break;
        }
        ladder = TemperatureLadder::new(next)?;
    }
    let (_, mut best) = best.expect("at least one calibration ran");
    best.iterations = options.max_iterations;
    warn!(
        "temperature tuning did not reach every rate within ±{} of {}; best rates {:?}",
        options.tolerance, target_exchange_rate, best.rates
    );
    Ok(best)
}

fn respace(betas: &[f64], rates: &[f64], target_gap: f64, max_rungs: usize) -> Vec<f64> {
    let gaps: Vec<f64> = rates.iter().map(|a| (-a.clamp(1e-4, 0.9999).ln()).sqrt()).collect();
    let mut cumulative = vec![0.0];
    for g in &gaps {
        cumulative.push(cumulative.last().unwrap() + g);
    }
    let total = *cumulative.last().unwrap();
    let rungs = ((total / target_gap).round() as usize + 1).clamp(2, max_rungs.max(2));
    let mut next = Vec::with_capacity(rungs);
    let mut segment = 0;
    for k in 0..rungs {
        let goal = total * k as f64 / (rungs - 1) as f64;
        while segment + 1 < gaps.len() && cumulative[segment + 1] < goal {
            segment += 1;
        }
        let (c0, c1) = (cumulative[segment], cumulative[segment + 1]);
        let t = if c1 > c0 { ((goal - c0) / (c1 - c0)).clamp(0.0, 1.0) } else { 0.0 };
        next.push(betas[segment] + t * (betas[segment + 1] - betas[segment]));
    }
    next[0] = betas[0];
    next[rungs - 1] = *betas.last().unwrap();
    next.dedup_by(|a, b| *a <= *b);
    next
}
