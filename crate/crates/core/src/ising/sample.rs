use super::{IsingProblem, SpinConfiguration};
use crate::error::{check_len, Result};

/// One solver output: a configuration, its energy, and the cumulative
/// solver time (spin-update clock, ns) at which it was emitted.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub config: SpinConfiguration,
    pub energy: f64,
    pub time_ns: u64,
    pub run_index: u32,
}

/// Samples of one solver run in order of emission. The order is the
/// default labelling used by the diversity algorithms.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub problem_id: String,
    pub num_spins: usize,
    pub samples: Vec<Sample>,
}

impl SampleSet {
    pub fn new(problem_id: impl Into<String>, num_spins: usize) -> Self {
        Self {
            problem_id: problem_id.into(),
            num_spins,
            samples: Vec::new(),
        }
    }

    pub fn for_problem(problem: &IsingProblem) -> Self {
        Self::new(problem.id(), problem.num_spins())
    }

    pub fn push(&mut self, sample: Sample) -> Result<()> {
        check_len(self.num_spins, sample.config.len())?;
        self.samples.push(sample);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.samples.iter()
    }

    pub fn configs(&self) -> Vec<SpinConfiguration> {
        self.samples.iter().map(|s| s.config.clone()).collect()
    }

    pub fn min_energy(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.energy).min_by(f64::total_cmp)
    }

    /// Latest emission time, 0 for an empty set.
    pub fn final_time(&self) -> u64 {
        self.samples.iter().map(|s| s.time_ns).max().unwrap_or(0)
    }

    /// Keeps the first `max` samples.
    pub fn truncate(&mut self, max: usize) {
        self.samples.truncate(max);
    }

    /// Appends `other`, shifting its times by `offset_ns`.
    pub fn extend_shifted(&mut self, other: SampleSet, offset_ns: u64) -> Result<()> {
        check_len(self.num_spins, other.num_spins)?;
        self.samples.extend(other.samples.into_iter().map(|mut s| {
            s.time_ns += offset_ns;
            s
        }));
        Ok(())
    }
}

impl<'a> IntoIterator for &'a SampleSet {
    type Item = &'a Sample;
    type IntoIter = std::slice::Iter<'a, Sample>;

    fn into_iter(self) -> Self::IntoIter {
        self.samples.iter()
    }
}
