//! Chimera graphs and the RAN1 / AC3 / DCL instance classes.

mod chimera;
mod generators;

use std::collections::VecDeque;

pub use chimera::{CellCoord, ChimeraGraph, Side};
pub use generators::{gen_ac3, gen_dcl, gen_ran1, generate, DclParams, InstanceClass, MAX_DCL_REJECTIONS};

use crate::error::{Error, Result};

/// Undirected simple graph as a node count and an edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= num_nodes || b >= num_nodes || a == b) {
            return Err(Error::invalid(format!("edge ({a}, {b}) invalid for {num_nodes} nodes")));
        }
        Ok(Self { num_nodes, edges })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Assignment of colour 0 or 1 to every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoColoring(Vec<u8>);

impl TwoColoring {
    pub fn new(colors: Vec<u8>) -> Self {
        Self(colors)
    }

    pub fn colors(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Fails on the first monochromatic or out-of-range edge.
    pub fn validate<I: IntoIterator<Item = (usize, usize)>>(&self, edges: I) -> Result<()> {
        for (a, b) in edges {
            match (self.0.get(a), self.0.get(b)) {
                (Some(x), Some(y)) if x != y && *x <= 1 && *y <= 1 => {}
                _ => return Err(Error::ImproperColoring(a, b)),
            }
        }
        Ok(())
    }
}

/// Breadth-first two-colouring; each component's lowest node gets colour 0.
pub fn two_coloring(graph: &Graph) -> Result<TwoColoring> {
    let adj = graph.adjacency_lists();
    let mut color: Vec<Option<u8>> = vec![None; graph.num_nodes()];
    let mut queue = VecDeque::new();
    for root in 0..graph.num_nodes() {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(0);
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            let cv = color[v].unwrap();
            for &u in &adj[v] {
                match color[u] {
                    None => {
                        color[u] = Some(1 - cv);
                        queue.push_back(u);
                    }
                    Some(cu) if cu == cv => return Err(Error::NotBipartite(u)),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(TwoColoring(color.into_iter().map(|c| c.unwrap()).collect()))
}
