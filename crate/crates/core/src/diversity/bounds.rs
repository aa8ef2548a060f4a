use super::{Adjacency, DEFAULT_MIS_PENALTY};
use crate::error::{Error, Result};
use crate::ising::IsingProblem;
use crate::solvers::{simulated_annealing, SaParams};

/// Largest graph accepted by [`exact_mis_bruteforce`].
pub const EXACT_MIS_LIMIT: usize = 30;

/// Greedy coloring of the complement graph in label order. The number of
/// classes bounds the independence number from above, since an independent
/// set is a clique of the complement and needs one class per member.
pub fn greedy_coloring_upper_bound<G: Adjacency + ?Sized>(graph: &G) -> usize {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..graph.num_vertices() {
        // v may join a class only if it is adjacent in G to every member.
        match classes.iter_mut().find(|c| c.iter().all(|&u| graph.adjacent(u, v))) {
            Some(class) => class.push(v),
            None => classes.push(vec![v]),
        }
    }
    classes.len()
}

/// Independence number by branch and bound over bitmasks.
pub fn exact_mis_bruteforce<G: Adjacency + ?Sized>(graph: &G) -> Result<usize> {
    let n = graph.num_vertices();
    if n > EXACT_MIS_LIMIT {
        return Err(Error::TooLarge { size: n, limit: EXACT_MIS_LIMIT });
    }
    let neighbors: Vec<u32> = (0..n)
        .map(|v| (0..n).filter(|&u| graph.adjacent(v, u)).fold(0u32, |m, u| m | 1 << u))
        .collect();
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = 0;
    branch(&neighbors, all, 0, &mut best);
    Ok(best)
}

fn branch(neighbors: &[u32], candidates: u32, size: usize, best: &mut usize) {
    if candidates == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + candidates.count_ones() as usize <= *best {
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << v);
    branch(neighbors, rest & !neighbors[v], size + 1, best);
    if neighbors[v] & rest != 0 {
        branch(neighbors, rest, size, best);
    }
}

/// MIS as an Ising problem; spin +1 selects a vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct MisIsing {
    pub problem: IsingProblem,
    /// Constant so that `energy + offset = −|S| + penalty · (violated edges)`.
    pub offset: f64,
}

/// Maps `−Σ x_v + penalty · Σ_edges x_a x_b` with `x = (1 + s) / 2` to spins.
pub fn mis_to_ising<G: Adjacency + ?Sized>(graph: &G, penalty: f64) -> Result<MisIsing> {
    if !(penalty > 1.0) || !penalty.is_finite() {
        return Err(Error::invalid(format!("MIS penalty must exceed 1, got {penalty}")));
    }
    let n = graph.num_vertices();
    let edges = graph.edges();
    let mut linear = vec![-0.5; n];
    for &(a, b) in &edges {
        linear[a] += penalty / 4.0;
        linear[b] += penalty / 4.0;
    }
    let problem = IsingProblem::new(n, linear, edges.iter().map(|&(a, b)| (a, b, penalty / 4.0)))?;
    Ok(MisIsing {
        problem,
        offset: -(n as f64) / 2.0 + penalty * edges.len() as f64 / 4.0,
    })
}

/// Anneals the MIS Hamiltonian with default settings.
pub fn tight_bound_via_sa<G: Adjacency + ?Sized>(graph: &G, seed: u64) -> Result<usize> {
    tight_bound_via_sa_with(graph, DEFAULT_MIS_PENALTY, &SaParams::geometric(0.1, 10.0, 1000, 20), seed)
}

/// Best independent set found by annealing. Any violated edge is repaired
/// by dropping its higher-numbered endpoint, so the result is always a
/// valid lower bound.
pub fn tight_bound_via_sa_with<G: Adjacency + ?Sized>(
    graph: &G,
    penalty: f64,
    params: &SaParams,
    seed: u64,
) -> Result<usize> {
    if graph.num_vertices() == 0 && penalty > 1.0 {
        return Ok(0);
    }
    let mapped = mis_to_ising(graph, penalty)?;
    let edges = graph.edges();
    let samples = simulated_annealing(&mapped.problem, &params.schedule, params.num_reads, seed)?;
    Ok(samples
        .iter()
        .map(|s| {
            let mut selected: Vec<bool> = s.config.spins().map(|x| x > 0).collect();
            for &(a, b) in &edges {
                if selected[a] && selected[b] {
                    selected[b] = false;
                }
            }
            selected.iter().filter(|&&x| x).count()
        })
        .max()
        .unwrap_or(0))
}
