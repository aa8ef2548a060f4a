use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ChimeraGraph, Graph};
use crate::error::{Error, Result};
use crate::ising::IsingProblem;
use crate::rng::{stream_rng, streams, StreamRng};

/// Consecutive loop rejections after which DCL generation gives up.
pub const MAX_DCL_REJECTIONS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceClass {
    Ran1,
    Ac3,
    Dcl,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 3] = [InstanceClass::Ran1, InstanceClass::Ac3, InstanceClass::Dcl];

    pub fn as_str(self) -> &'static str {
        match self {
            InstanceClass::Ran1 => "ran1",
            InstanceClass::Ac3 => "ac3",
            InstanceClass::Dcl => "dcl",
        }
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ran1" => Ok(InstanceClass::Ran1),
            "ac3" => Ok(InstanceClass::Ac3),
            "dcl" => Ok(InstanceClass::Dcl),
            other => Err(Error::invalid(format!("unknown instance class {other:?}"))),
        }
    }
}

/// Deceptive-cluster-loop parameters `(α_DCL, R_DCL, λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DclParams {
    /// Loops per logical variable.
    pub alpha: f64,
    /// Cap on accumulated logical coupling magnitude.
    pub ruggedness: u32,
    /// Intra-cell ferromagnetic scale.
    pub lambda: f64,
}

impl Default for DclParams {
    fn default() -> Self {
        Self {
            alpha: 0.25,
            ruggedness: 1,
            lambda: 7.0,
        }
    }
}

impl DclParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(format!("alpha_dcl must be positive, got {}", self.alpha)));
        }
        if self.ruggedness < 1 {
            return Err(Error::invalid("r_dcl must be at least 1"));
        }
        if !(self.lambda >= 1.0) || !self.lambda.is_finite() {
            return Err(Error::invalid(format!("lambda must be at least 1, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Bimodal ±1 couplings on every edge, zero field.
pub fn gen_ran1(graph: &Graph, seed: u64) -> IsingProblem {
    let mut rng = stream_rng(seed, streams::BIMODAL);
    let couplings = graph
        .edges()
        .iter()
        .map(|&(a, b)| (a, b, if rng.gen::<bool>() { 1.0 } else { -1.0 }))
        .collect::<Vec<_>>();
    IsingProblem::from_couplings(graph.num_nodes(), couplings)
        .expect("graph edges are valid couplings")
        .with_metadata("class", InstanceClass::Ran1.as_str())
        .with_metadata("seed", seed)
}

/// RAN1 with every inter-cell coupling multiplied by 3.
pub fn gen_ac3(chimera: &ChimeraGraph, seed: u64) -> IsingProblem {
    let base = gen_ran1(chimera.graph(), seed);
    let couplings = base.couplings().iter().map(|c| {
        let scale = if chimera.is_inter_cell(c.i, c.j) { 3.0 } else { 1.0 };
        (c.i, c.j, c.value * scale)
    });
    IsingProblem::from_couplings(chimera.num_nodes(), couplings.collect::<Vec<_>>())
        .expect("scaling preserves validity")
        .with_metadata("class", InstanceClass::Ac3.as_str())
        .with_metadata("seed", seed)
}

/// Deceptive cluster loops on the cell grid, expanded onto Chimera.
///
/// Each cell is one logical variable. `round(α · cells)` closed loops are
/// drawn as non-backtracking random walks on the 4-neighbour cell lattice
/// that stop at their first self-intersection (the enclosed cycle has
/// length ≥ 4); every loop edge gets -1 except one random edge set to +1.
/// A loop that would push any accumulated logical coupling above `R_DCL`
/// in magnitude is rejected and redrawn. Physically, intra-cell couplings
/// are all `-λ` and each logical coupling is copied onto the four
/// inter-cell edges between its two cells.
pub fn gen_dcl(chimera: &ChimeraGraph, seed: u64, params: &DclParams) -> Result<IsingProblem> {
    params.validate()?;
    let mut rng = stream_rng(seed, streams::DCL);
    let (rows, cols) = (chimera.rows(), chimera.cols());
    let cells = rows * cols;
    let num_loops = (params.alpha * cells as f64).round() as usize;
    let cap = params.ruggedness as i64;

    let mut logical: HashMap<(usize, usize), i64> = HashMap::new();
    let mut accepted = 0;
    let mut rejections = 0u64;
    while accepted < num_loops {
        let Some(cycle) = random_cell_loop(rows, cols, &mut rng) else {
            return Err(Error::GenerationStuck(0));
        };
        let frustrated = rng.gen_range(0..cycle.len());
        let updates: Vec<((usize, usize), i64)> = cycle
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| {
                let key = (a.min(b), a.max(b));
                let delta = if k == frustrated { 1 } else { -1 };
                (key, logical.get(&key).copied().unwrap_or(0) + delta)
            })
            .collect();
        if updates.iter().any(|(_, v)| v.abs() > cap) {
            rejections += 1;
            if rejections >= MAX_DCL_REJECTIONS {
                return Err(Error::GenerationStuck(rejections));
            }
            continue;
        }
        rejections = 0;
        for (key, v) in updates {
            logical.insert(key, v);
        }
        accepted += 1;
    }

    let couplings: Vec<(usize, usize, f64)> = chimera
        .graph()
        .edges()
        .iter()
        .filter_map(|&(a, b)| {
            let (ca, cb) = (chimera.cell_index(a), chimera.cell_index(b));
            if ca == cb {
                Some((a, b, -params.lambda))
            } else {
                let j = logical.get(&(ca.min(cb), ca.max(cb))).copied().unwrap_or(0);
                (j != 0).then_some((a, b, j as f64))
            }
        })
        .collect();
    Ok(IsingProblem::from_couplings(chimera.num_nodes(), couplings)?
        .with_metadata("class", InstanceClass::Dcl.as_str())
        .with_metadata("seed", seed)
        .with_metadata("alpha_dcl", params.alpha)
        .with_metadata("r_dcl", params.ruggedness)
        .with_metadata("lambda", params.lambda))
}

/// Non-backtracking random walk on the cell lattice, stopped at the first
/// revisit; the closed part of the walk is the loop. `None` when the grid
/// has no cycles.
fn random_cell_loop(rows: usize, cols: usize, rng: &mut StreamRng) -> Option<Vec<(usize, usize)>> {
    if rows < 2 || cols < 2 {
        return None;
    }
    let cells = rows * cols;
    let mut position = vec![usize::MAX; cells];
    let mut path = vec![rng.gen_range(0..cells)];
    position[path[0]] = 0;
    let mut options = Vec::with_capacity(4);
    loop {
        let cur = *path.last().unwrap();
        let prev = path.len().checked_sub(2).map(|k| path[k]);
        let (r, c) = (cur / cols, cur % cols);
        options.clear();
        if r > 0 {
            options.push(cur - cols);
        }
        if r + 1 < rows {
            options.push(cur + cols);
        }
        if c > 0 {
            options.push(cur - 1);
        }
        if c + 1 < cols {
            options.push(cur + 1);
        }
        options.retain(|&n| Some(n) != prev);
        let &next = options.choose(rng)?;
        if position[next] != usize::MAX {
            let cycle = &path[position[next]..];
            let mut edges: Vec<(usize, usize)> = cycle.windows(2).map(|w| (w[0], w[1])).collect();
            edges.push((cur, next));
            debug_assert!(edges.len() >= 4);
            return Some(edges);
        }
        position[next] = path.len();
        path.push(next);
    }
}

/// Generates one instance of `class` on `chimera`, tagging class, seed,
/// grid size and a file-friendly id in the metadata.
pub fn generate(class: InstanceClass, chimera: &ChimeraGraph, seed: u64, dcl: &DclParams) -> Result<IsingProblem> {
    let problem = match class {
        InstanceClass::Ran1 => gen_ran1(chimera.graph(), seed),
        InstanceClass::Ac3 => gen_ac3(chimera, seed),
        InstanceClass::Dcl => gen_dcl(chimera, seed, dcl)?,
    };
    let size_tag = match chimera.size() {
        Some(l) => format!("L{l}"),
        None => format!("L{}x{}", chimera.rows(), chimera.cols()),
    };
    Ok(problem
        .with_metadata("rows", chimera.rows())
        .with_metadata("cols", chimera.cols())
        .with_metadata("L", chimera.size().unwrap_or(chimera.rows()))
        .with_metadata("id", format!("{class}_{size_tag}_s{seed}")))
}
