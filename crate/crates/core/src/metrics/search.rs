use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingProblem;
use crate::rng::derive_seed;
use crate::solvers::PreparedSolver;
use crate::topology::two_coloring;

/// Best and worst energies found for one problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBounds {
    pub e_min: f64,
    pub e_max: f64,
    /// Candidates inspected for `e_min`.
    pub candidates: usize,
    /// `e_max` was taken as `−e_min` (zero field on a bipartite graph).
    pub symmetric: bool,
}

fn pooled_minimum(problem: &IsingProblem, budget: usize, solvers: &[PreparedSolver], seed: u64) -> Result<(f64, usize)> {
    let mut best = f64::INFINITY;
    let mut used = 0;
    for (i, solver) in solvers.iter().enumerate() {
        if used >= budget {
            break;
        }
        let solver = if problem.has_zero_field() { solver.clone() } else { solver.without_cluster_moves() };
        let samples = solver.run(problem, derive_seed(seed, i as u64), None)?;
        for s in samples.iter().take(budget - used) {
            best = best.min(s.energy);
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::NoCandidates);
    }
    Ok((best, used))
}

/// Minimum energy over up to `budget_samples` candidates pooled from
/// `solvers` in order. The maximum is `−e_min` when the field is zero and
/// the coupling graph is bipartite, and otherwise the negated minimum of
/// `−H` searched the same way.
pub fn min_max_energy_search(
    problem: &IsingProblem,
    budget_samples: usize,
    solvers: &[PreparedSolver],
    seed: u64,
) -> Result<EnergyBounds> {
    let (e_min, candidates) = pooled_minimum(problem, budget_samples, solvers, seed)?;
    if problem.has_zero_field() {
        if let Ok(coloring) = two_coloring(&problem.coupling_graph()) {
            return Ok(EnergyBounds {
                e_min,
                e_max: problem.max_energy_bipartite(&coloring, e_min)?,
                candidates,
                symmetric: true,
            });
        }
    }
    let (neg_min, _) = pooled_minimum(&problem.negated(), budget_samples, solvers, derive_seed(seed, u64::MAX))?;
    Ok(EnergyBounds {
        e_min,
        e_max: -neg_min,
        candidates,
        symmetric: false,
    })
}
