use std::collections::HashSet;

use rand::RngCore;
use rayon::prelude::*;

use super::{check_radius, Adjacency};
use crate::error::{check_len, Error, Result};
use crate::ising::SpinConfiguration;
use crate::rng::{stream_rng, StreamRng};

/// Output of one greedy scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LnaResult {
    /// Chosen vertices in scan order.
    pub set: Vec<usize>,
    /// Adjacency tests performed; at most `M · set.len()`.
    pub checks: u64,
}

impl LnaResult {
    pub fn size(&self) -> usize {
        self.set.len()
    }
}

pub fn is_independent_set<G: Adjacency + ?Sized>(graph: &G, set: &[usize]) -> bool {
    set.iter()
        .enumerate()
        .all(|(k, &a)| set[k + 1..].iter().all(|&b| a != b && !graph.adjacent(a, b)))
}

/// Scans vertices in `order`, keeping each one not adjacent to a vertex
/// already kept.
pub fn lna_lower_bound<G: Adjacency + ?Sized>(graph: &G, order: &[usize]) -> Result<LnaResult> {
    let m = graph.num_vertices();
    if order.len() != m {
        return Err(Error::invalid(format!("order has {} entries for {m} vertices", order.len())));
    }
    let mut seen = vec![false; m];
    for &v in order {
        if v >= m || std::mem::replace(&mut seen[v], true) {
            return Err(Error::invalid(format!("order is not a permutation (entry {v})")));
        }
    }
    Ok(scan(graph, order.iter().copied()))
}

fn scan<G: Adjacency + ?Sized>(graph: &G, order: impl Iterator<Item = usize>) -> LnaResult {
    let mut set: Vec<usize> = Vec::new();
    let mut checks = 0u64;
    for v in order {
        let mut free = true;
        for &u in &set {
            checks += 1;
            if graph.adjacent(u, v) {
                free = false;
                break;
            }
        }
        if free {
            set.push(v);
        }
    }
    debug_assert!(is_independent_set(graph, &set));
    LnaResult { set, checks }
}

/// Random priority of each of `len` vertices under shuffle `shuffle`: the
/// identity for 0, otherwise the `v`-th draw of the shuffle's stream.
/// The key of a vertex does not depend on how many vertices follow it.
fn priority_keys(len: usize, seed: u64, shuffle: u64) -> Vec<u64> {
    if shuffle == 0 {
        return (0..len as u64).collect();
    }
    let mut rng = stream_rng(seed, shuffle);
    (0..len).map(|_| rng.next_u64()).collect()
}

/// Scan order number `shuffle`: vertices sorted by their priority keys.
/// Restricting the order for `len` vertices to the first `k` gives the
/// order for `k`.
pub fn shuffle_order(len: usize, seed: u64, shuffle: u64) -> Vec<usize> {
    let keys = priority_keys(len, seed, shuffle);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by_key(|&v| (keys[v], v));
    order
}

/// Best scan over the identity order and `num_shuffles − 1` random ones.
/// Shuffle `k` does not depend on `num_shuffles`, so raising it never
/// lowers the result.
pub fn lna_best_of_shuffles<G: Adjacency + ?Sized>(graph: &G, num_shuffles: usize, seed: u64) -> Result<usize> {
    if num_shuffles == 0 {
        return Err(Error::invalid("at least one shuffle is required"));
    }
    let m = graph.num_vertices();
    Ok((0..num_shuffles as u64)
        .into_par_iter()
        .map(|s| scan(graph, shuffle_order(m, seed, s).into_iter()).size())
        .max()
        .unwrap_or(0))
}

struct ShuffleState {
    rng: StreamRng,
    /// Present vertices sorted by `(key, index)`.
    order: Vec<(u64, usize)>,
    best: usize,
}

/// Lower bound maintained while solutions arrive in time order.
///
/// Vertices are numbered by first arrival and every shuffle gives each one
/// a fixed random priority, so the scan order after any prefix of arrivals
/// is the restriction of the final order. After all arrivals the value
/// equals [`lna_best_of_shuffles`] on the whole set with the same seed.
pub struct IncrementalLna {
    threshold: f64,
    num_spins: usize,
    vertices: Vec<SpinConfiguration>,
    seen: HashSet<SpinConfiguration>,
    shuffles: Vec<ShuffleState>,
}

impl IncrementalLna {
    pub fn new(radius: f64, num_spins: usize, num_shuffles: usize, seed: u64) -> Result<Self> {
        check_radius(radius)?;
        if num_shuffles == 0 {
            return Err(Error::invalid("at least one shuffle is required"));
        }
        Ok(Self {
            threshold: radius * num_spins as f64,
            num_spins,
            vertices: Vec::new(),
            seen: HashSet::new(),
            shuffles: (0..num_shuffles as u64)
                .map(|s| ShuffleState {
                    rng: stream_rng(seed, s),
                    order: Vec::new(),
                    best: 0,
                })
                .collect(),
        })
    }

    /// Adds configurations (duplicates are ignored) and rescans.
    pub fn extend<I>(&mut self, configs: I) -> Result<()>
    where
        I: IntoIterator<Item = SpinConfiguration>,
    {
        let start = self.vertices.len();
        for c in configs {
            check_len(self.num_spins, c.len())?;
            if self.seen.insert(c.clone()) {
                self.vertices.push(c);
            }
        }
        let end = self.vertices.len();
        if end == start {
            return Ok(());
        }
        let (vertices, threshold) = (&self.vertices, self.threshold);
        self.shuffles.par_iter_mut().enumerate().for_each(|(k, state)| {
            let mut fresh: Vec<(u64, usize)> = (start..end)
                .map(|v| (if k == 0 { v as u64 } else { state.rng.next_u64() }, v))
                .collect();
            fresh.sort_unstable();
            let old = std::mem::take(&mut state.order);
            state.order = merge(old, fresh);
            let mut set: Vec<usize> = Vec::new();
            for &(_, v) in &state.order {
                if set
                    .iter()
                    .all(|&u| vertices[u].hamming_unchecked(&vertices[v]) as f64 > threshold)
                {
                    set.push(v);
                }
            }
            state.best = set.len();
        });
        Ok(())
    }

    /// Best scan over the vertices added so far.
    pub fn best(&self) -> usize {
        self.shuffles.iter().map(|s| s.best).max().unwrap_or(0)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
}

fn merge(a: Vec<(u64, usize)>, b: Vec<(u64, usize)>) -> Vec<(u64, usize)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::super::{exact_mis_bruteforce, DistanceGraph, SimpleGraph};
    use super::*;
    use proptest::prelude::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn hand_traces() {
        assert_eq!(lna_lower_bound(&SimpleGraph::edgeless(6), &[5, 4, 3, 2, 1, 0]).unwrap().size(), 6);
        assert_eq!(lna_lower_bound(&SimpleGraph::complete(6), &[2, 0, 1, 3, 4, 5]).unwrap().size(), 1);
        let r = lna_lower_bound(&SimpleGraph::path(3), &[0, 1, 2]).unwrap();
        assert_eq!(r.set, vec![0, 2]);
        assert_eq!(lna_lower_bound(&SimpleGraph::path(3), &[1, 0, 2]).unwrap().set, vec![1]);
    }

    #[test]
    fn rejects_bad_orders() {
        let g = SimpleGraph::path(3);
        assert!(lna_lower_bound(&g, &[0, 1]).is_err());
        assert!(lna_lower_bound(&g, &[0, 1, 1]).is_err());
        assert!(lna_lower_bound(&g, &[0, 1, 3]).is_err());
        assert!(lna_best_of_shuffles(&g, 0, 0).is_err());
    }

    #[test]
    fn edgeless_ignores_shuffle_count() {
        for k in [1, 2, 17] {
            assert_eq!(lna_best_of_shuffles(&SimpleGraph::edgeless(9), k, 4).unwrap(), 9);
        }
    }

    #[test]
    fn some_order_is_optimal_on_small_graphs() {
        for seed in 0..40 {
            let n = 1 + (seed as usize % 8);
            let g = SimpleGraph::random(n, 0.4, seed);
            let exact = exact_mis_bruteforce(&g).unwrap();
            let best = permutations(n)
                .iter()
                .map(|p| lna_lower_bound(&g, p).unwrap().size())
                .max()
                .unwrap();
            assert_eq!(best, exact, "seed {seed}");
            assert_eq!(lna_best_of_shuffles(&g, 2000, seed).unwrap(), exact, "seed {seed}");
        }
    }

    #[test]
    fn shuffle_orders_nest() {
        let long = shuffle_order(50, 3, 4);
        let short = shuffle_order(20, 3, 4);
        let restricted: Vec<usize> = long.into_iter().filter(|&v| v < 20).collect();
        assert_eq!(restricted, short);
        assert_eq!(shuffle_order(5, 3, 0), vec![0, 1, 2, 3, 4]);
    }

    proptest! {
        #[test]
        fn incremental_matches_batch_after_every_block(seed in any::<u64>(), blocks in proptest::collection::vec(0usize..25, 1..6)) {
            let mut rng = stream_rng(seed, 2);
            let mut inc = IncrementalLna::new(0.35, 20, 6, seed).unwrap();
            let mut all = Vec::new();
            for size in blocks {
                let block: Vec<_> = (0..size).map(|_| SpinConfiguration::random(20, &mut rng)).collect();
                all.extend(block.iter().cloned());
                inc.extend(block).unwrap();
                let g = DistanceGraph::new(all.clone(), 0.35, 20).unwrap();
                prop_assert_eq!(inc.num_vertices(), g.num_vertices());
                prop_assert_eq!(inc.best(), lna_best_of_shuffles(&g, 6, seed).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn scan_is_independent_and_cheap(seed in any::<u64>(), n in 1usize..40, p in 0.0f64..1.0) {
            let g = SimpleGraph::random(n, p, seed);
            let order = shuffle_order(n, seed, 1);
            let r = lna_lower_bound(&g, &order).unwrap();
            prop_assert!(is_independent_set(&g, &r.set));
            prop_assert!(r.checks <= (n * r.size()) as u64);
            prop_assert!(r.size() >= 1);
        }

        #[test]
        fn more_shuffles_never_hurt(seed in any::<u64>(), n in 1usize..30, k in 1usize..20) {
            let g = SimpleGraph::random(n, 0.3, seed);
            prop_assert!(lna_best_of_shuffles(&g, k + 1, seed).unwrap() >= lna_best_of_shuffles(&g, k, seed).unwrap());
        }
    }
}
