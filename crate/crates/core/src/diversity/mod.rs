//! Diversity of a set of good solutions: the independence number of the
//! graph joining every pair of solutions closer than `R·N` in Hamming
//! distance, bracketed by cheap lower and upper bounds.

mod bounds;
mod lna;

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::SpinConfiguration;
use crate::rng::stream_rng;

pub use bounds::{
    exact_mis_bruteforce, greedy_coloring_upper_bound, mis_to_ising, tight_bound_via_sa, tight_bound_via_sa_with,
    MisIsing, EXACT_MIS_LIMIT,
};
pub use lna::{is_independent_set, lna_best_of_shuffles, lna_lower_bound, shuffle_order, IncrementalLna, LnaResult};

/// Default number of scan orders tried by the lower bound.
pub const DEFAULT_SHUFFLES: usize = 100;
/// Default MIS penalty for the Ising mapping.
pub const DEFAULT_MIS_PENALTY: f64 = 2.0;

/// Read-only undirected graph without self-loops.
pub trait Adjacency: Sync {
    fn num_vertices(&self) -> usize;
    /// Never true for `a == b`.
    fn adjacent(&self, a: usize, b: usize) -> bool;

    fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.num_vertices())
            .into_par_iter()
            .flat_map_iter(|a| (a + 1..self.num_vertices()).filter(move |&b| self.adjacent(a, b)).map(move |b| (a, b)))
            .collect()
    }

    fn degree(&self, v: usize) -> usize {
        (0..self.num_vertices()).filter(|&u| self.adjacent(v, u)).count()
    }
}

pub(crate) fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("radius must lie in (0, 1], got {radius}")))
    }
}

/// Unique configurations joined when `d ≤ R·N`. Edges are evaluated on
/// demand from the packed spins instead of being stored.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceGraph {
    vertices: Vec<SpinConfiguration>,
    radius: f64,
    num_spins: usize,
    threshold: f64,
}

impl DistanceGraph {
    /// Deduplicates `configs`, keeping first occurrences in order.
    pub fn new<I>(configs: I, radius: f64, num_spins: usize) -> Result<Self>
    where
        I: IntoIterator<Item = SpinConfiguration>,
    {
        check_radius(radius)?;
        let mut seen = HashSet::new();
        let mut vertices = Vec::new();
        for c in configs {
            crate::error::check_len(num_spins, c.len())?;
            if seen.insert(c.clone()) {
                vertices.push(c);
            }
        }
        Ok(Self {
            vertices,
            radius,
            num_spins,
            threshold: radius * num_spins as f64,
        })
    }

    pub fn vertices(&self) -> &[SpinConfiguration] {
        &self.vertices
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.vertices[a].hamming_unchecked(&self.vertices[b])
    }
}

impl Adjacency for DistanceGraph {
    fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.distance(a, b) as f64 <= self.threshold
    }
}

/// Small explicit graph backed by a dense adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    matrix: Vec<bool>,
}

impl SimpleGraph {
    pub fn edgeless(n: usize) -> Self {
        Self { n, matrix: vec![false; n * n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::edgeless(n);
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::invalid(format!("bad edge ({a}, {b}) for {n} vertices")));
            }
            g.matrix[a * n + b] = true;
            g.matrix[b * n + a] = true;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        for a in 0..n {
            for b in 0..n {
                g.matrix[a * n + b] = a != b;
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Self::from_edges(n, &edges).expect("cycle edges are valid")
    }

    /// Erdős–Rényi graph with edge probability `p`.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = stream_rng(seed, 0);
        let mut g = Self::edgeless(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen::<f64>() < p {
                    g.matrix[a * n + b] = true;
                    g.matrix[b * n + a] = true;
                }
            }
        }
        g
    }

    /// Copies the edges of any graph.
    pub fn from_adjacency<G: Adjacency + ?Sized>(graph: &G) -> Self {
        let n = graph.num_vertices();
        let mut g = Self::edgeless(n);
        for (a, b) in graph.edges() {
            g.matrix[a * n + b] = true;
            g.matrix[b * n + a] = true;
        }
        g
    }
}

impl Adjacency for SimpleGraph {
    fn num_vertices(&self) -> usize {
        self.n
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.matrix[a * self.n + b]
    }
}

/// Lower and upper bounds on the diversity of one graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversityEstimate {
    pub lower: usize,
    /// Present only when requested: the coloring costs O(M²) distances.
    pub upper: Option<usize>,
    pub exact: Option<usize>,
    pub num_shuffles_used: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateOptions {
    pub shuffles: usize,
    pub seed: u64,
    pub upper: bool,
    pub exact: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            shuffles: DEFAULT_SHUFFLES,
            seed: 0,
            upper: false,
            exact: false,
        }
    }
}

pub fn estimate_diversity<G: Adjacency + ?Sized>(graph: &G, options: &EstimateOptions) -> Result<DiversityEstimate> {
    let lower = lna_best_of_shuffles(graph, options.shuffles, options.seed)?;
    let upper = options.upper.then(|| greedy_coloring_upper_bound(graph));
    let exact = if options.exact { Some(exact_mis_bruteforce(graph)?) } else { None };
    Ok(DiversityEstimate {
        lower,
        upper,
        exact,
        num_shuffles_used: options.shuffles,
    })
}
