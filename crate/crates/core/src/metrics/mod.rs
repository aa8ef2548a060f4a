//! Fitness thresholds, target diversity, diversity-over-time curves and
//! time-to-diversity.

mod curve;
mod search;
mod ttd;

use log::warn;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::diversity::{check_radius, lna_best_of_shuffles, DistanceGraph};
use crate::error::{Error, Result};
use crate::ising::{SampleSet, SpinConfiguration};
use crate::rng::derive_seed;

pub use curve::{diversity_over_time, estimate_success_probability, CurvePoint, DiversityCurve};
pub use search::{min_max_energy_search, EnergyBounds};
pub use ttd::{run_grid, ttd, ttd_record, Ttd, TtdRecord};

/// Default number of independent target calculations.
pub const DEFAULT_TARGET_CALCULATIONS: usize = 100;

/// `(e − e_min) / (e_max − e_min)`.
pub fn approximation_ratio(e: f64, e_min: f64, e_max: f64) -> Result<f64> {
    check_spectrum(e_min, e_max)?;
    Ok((e - e_min) / (e_max - e_min))
}

/// `e_min + alpha · (e_max − e_min)` for any `alpha` in [0, 1].
pub fn energy_threshold(alpha: f64, e_min: f64, e_max: f64) -> Result<f64> {
    check_spectrum(e_min, e_max)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(e_min + alpha * (e_max - e_min))
}

fn check_spectrum(e_min: f64, e_max: f64) -> Result<()> {
    if !e_min.is_finite() || !e_max.is_finite() {
        return Err(Error::invalid("energy bounds must be finite"));
    }
    if e_max == e_min {
        return Err(Error::DegenerateSpectrum(e_min));
    }
    if e_max < e_min {
        return Err(Error::invalid(format!("e_max {e_max} is below e_min {e_min}")));
    }
    Ok(())
}

/// Quality threshold and distance radius used to score a sample set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationSpec {
    pub alpha: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub radius: f64,
}

impl ApproximationSpec {
    /// Requires `0 ≤ alpha ≤ 0.5`, `e_max > e_min` and `0 < radius ≤ 1`.
    pub fn new(alpha: f64, e_min: f64, e_max: f64, radius: f64) -> Result<Self> {
        check_spectrum(e_min, e_max)?;
        if !(0.0..=0.5).contains(&alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 0.5], got {alpha}")));
        }
        check_radius(radius)?;
        Ok(Self { alpha, e_min, e_max, radius })
    }

    pub fn approximation_ratio(&self, e: f64) -> f64 {
        (e - self.e_min) / (self.e_max - self.e_min)
    }

    pub fn energy_threshold(&self) -> f64 {
        self.e_min + self.alpha * (self.e_max - self.e_min)
    }
}

/// Configurations with energy ≤ `threshold`, first occurrences only, in
/// sample order.
pub fn filter_fit_unique(samples: &SampleSet, threshold: f64) -> Vec<SpinConfiguration> {
    let mut seen = HashSet::new();
    samples
        .iter()
        .filter(|s| s.energy <= threshold && seen.insert(&s.config))
        .map(|s| s.config.clone())
        .collect()
}

/// Diversity a solver has to reach, measured on a reference sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetDiversity {
    pub value: usize,
    /// Describes the reference set (file path or solver).
    pub source: String,
    pub alpha: f64,
    pub radius: f64,
    pub num_fit: usize,
}

/// Maximum of `num_calculations` best-of-shuffles lower bounds over the fit
/// reference samples. Calculation `i` is seeded independently of the
/// count, so more calculations never give a smaller target.
pub fn target_diversity(
    reference: &SampleSet,
    spec: &ApproximationSpec,
    num_calculations: usize,
    shuffles_per_calc: usize,
    seed: u64,
    source: impl Into<String>,
) -> Result<TargetDiversity> {
    if num_calculations == 0 {
        return Err(Error::invalid("num_calculations must be at least 1"));
    }
    let fit = filter_fit_unique(reference, spec.energy_threshold());
    let source = source.into();
    let num_fit = fit.len();
    let value = if fit.is_empty() {
        warn!("reference set {source:?} has no sample below the energy threshold; target diversity is 0");
        0
    } else {
        let graph = DistanceGraph::new(fit, spec.radius, reference.num_spins)?;
        let mut best = 0;
        for i in 0..num_calculations {
            best = best.max(lna_best_of_shuffles(&graph, shuffles_per_calc, derive_seed(seed, i as u64))?);
        }
        best
    };
    Ok(TargetDiversity {
        value,
        source,
        alpha: spec.alpha,
        radius: spec.radius,
        num_fit,
    })
}
