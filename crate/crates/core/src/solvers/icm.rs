use rand::Rng;

use super::replica::Replica;
use crate::error::{Error, Result};
use crate::ising::IsingProblem;

/// Houdayer iso-energetic cluster move between two replicas at the same
/// temperature.
///
/// A uniformly chosen site where the replicas disagree seeds a cluster
/// grown through coupled sites that also disagree; the cluster is flipped
/// in both replicas. With zero field `E_a + E_b` is unchanged. Returns the
/// cluster size (0 when the replicas are identical).
pub fn icm_move<R: Rng + ?Sized>(problem: &IsingProblem, a: &mut Replica, b: &mut Replica, rng: &mut R) -> Result<usize> {
    if !problem.has_zero_field() {
        return Err(Error::Precondition("cluster moves are only iso-energetic with zero field".into()));
    }
    Ok(icm_move_unchecked(problem, a, b, rng))
}

pub(crate) fn icm_move_unchecked<R: Rng + ?Sized>(problem: &IsingProblem, a: &mut Replica, b: &mut Replica, rng: &mut R) -> usize {
    let (sa, sb) = (a.spins(), b.spins());
    let disagree: Vec<usize> = (0..problem.num_spins()).filter(|&i| sa[i] != sb[i]).collect();
    if disagree.is_empty() {
        return 0;
    }
    let root = disagree[rng.gen_range(0..disagree.len())];
    let mut in_cluster = vec![false; problem.num_spins()];
    in_cluster[root] = true;
    let mut stack = vec![root];
    let mut cluster = Vec::new();
    while let Some(v) = stack.pop() {
        cluster.push(v);
        for &(u, _) in problem.neighbors(v) {
            if !in_cluster[u] && sa[u] != sb[u] {
                in_cluster[u] = true;
                stack.push(u);
            }
        }
    }
    for &v in &cluster {
        a.flip(problem, v);
        b.flip(problem, v);
    }
    cluster.len()
}
