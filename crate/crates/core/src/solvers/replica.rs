use rand::Rng;

use crate::error::{check_len, Result};
use crate::ising::{IsingProblem, SpinConfiguration};

/// Counts single-spin updates; one update is charged as 1 ns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpinUpdateClock {
    total_updates: u64,
}

impl SpinUpdateClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&mut self, updates: u64) {
        self.total_updates += updates;
    }

    pub fn total_updates(&self) -> u64 {
        self.total_updates
    }

    pub fn elapsed_ns(&self) -> u64 {
        self.total_updates
    }
}

/// A spin state with cached local fields `f_i = h_i + Σ_j J_ij s_j` and an
/// incrementally maintained energy.
#[derive(Clone, Debug, PartialEq)]
pub struct Replica {
    spins: Vec<i8>,
    fields: Vec<f64>,
    energy: f64,
}

impl Replica {
    pub fn new(problem: &IsingProblem, config: &SpinConfiguration) -> Result<Self> {
        check_len(problem.num_spins(), config.len())?;
        Ok(Self::from_spins(problem, config.to_spin_vec()))
    }

    pub fn random<R: Rng + ?Sized>(problem: &IsingProblem, rng: &mut R) -> Self {
        let spins = (0..problem.num_spins()).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        Self::from_spins(problem, spins)
    }

    fn from_spins(problem: &IsingProblem, spins: Vec<i8>) -> Self {
        let fields = (0..problem.num_spins())
            .map(|i| {
                problem.linear()[i]
                    + problem.neighbors(i).iter().map(|&(j, v)| v * spins[j] as f64).sum::<f64>()
            })
            .collect();
        let energy = problem.energy_of_spins(&spins);
        Self { spins, fields, energy }
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn config(&self) -> SpinConfiguration {
        SpinConfiguration::from_down_bits(self.spins.iter().map(|&s| s < 0))
    }

    /// Energy change from flipping spin `i`.
    #[inline]
    pub fn flip_delta(&self, i: usize) -> f64 {
        -2.0 * self.spins[i] as f64 * self.fields[i]
    }

    #[inline]
    pub fn flip(&mut self, problem: &IsingProblem, i: usize) {
        let old = self.spins[i] as f64;
        self.energy += -2.0 * old * self.fields[i];
        self.spins[i] = -self.spins[i];
        for &(j, v) in problem.neighbors(i) {
            self.fields[j] -= 2.0 * v * old;
        }
    }
}

/// One Metropolis sweep in fixed site order `0..N`, charging `N` updates.
pub fn metropolis_sweep<R: Rng + ?Sized>(
    problem: &IsingProblem,
    replica: &mut Replica,
    beta: f64,
    rng: &mut R,
    clock: &mut SpinUpdateClock,
) {
    for i in 0..problem.num_spins() {
        let delta = replica.flip_delta(i);
        if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
            replica.flip(problem, i);
        }
    }
    clock.advance(problem.num_spins() as u64);
}
