use serde::{Deserialize, Serialize};

use super::curve::DiversityCurve;
use crate::error::{Error, Result};

/// Time to reach the target with 99% confidence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Ttd {
    Finite(f64),
    /// The target was never reached.
    Unbounded,
}

impl Ttd {
    pub fn finite(self) -> Option<f64> {
        match self {
            Ttd::Finite(t) => Some(t),
            Ttd::Unbounded => None,
        }
    }
}

/// `n_runs · t_a · ln(0.01) / ln(1 − p)`, with the ratio clamped to 1 for
/// `p ≥ 0.99` since a block cannot take less than its own duration.
pub fn ttd(p: f64, n_runs: u64, t_a_ns: f64) -> Result<Ttd> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("success probability must lie in [0, 1], got {p}")));
    }
    let block = n_runs as f64 * t_a_ns;
    if p == 0.0 {
        return Ok(Ttd::Unbounded);
    }
    if p >= 0.99 {
        return Ok(Ttd::Finite(block));
    }
    Ok(Ttd::Finite(block * (0.01f64.ln() / (1.0 - p).ln())))
}

/// Up to `points` distinct run counts between 1 and `max_runs`, spaced
/// logarithmically and always ending at `max_runs`.
pub fn run_grid(max_runs: u64, points: usize) -> Vec<u64> {
    if max_runs == 0 || points == 0 {
        return Vec::new();
    }
    let mut grid: Vec<u64> = (0..points)
        .map(|k| {
            let f = if points == 1 { 1.0 } else { k as f64 / (points - 1) as f64 };
            ((max_runs as f64).powf(f).round() as u64).clamp(1, max_runs)
        })
        .collect();
    grid.push(max_runs);
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// TTD of one solver on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtdRecord {
    pub solver_id: String,
    pub instance_id: String,
    pub target: usize,
    /// Success fraction at the optimal block length.
    pub p: f64,
    pub successes: usize,
    pub experiments: usize,
    pub n_runs: u64,
    pub t_a_ns: u64,
    /// `None` when no experiment reached the target.
    pub ttd_ns: Option<f64>,
    /// Every experiment hit its time limit without reaching the target.
    pub censored: bool,
    /// `(n_runs · t_a, success fraction)` for each block length tried.
    pub grid: Vec<(u64, f64)>,
}

/// Minimises TTD over block lengths `k · t_a` for `k` in `runs`.
/// Ties go to the shorter block.
pub fn ttd_record(
    solver_id: &str,
    instance_id: &str,
    curves: &[DiversityCurve],
    target: usize,
    t_a_ns: u64,
    runs: &[u64],
) -> Result<TtdRecord> {
    if curves.is_empty() {
        return Err(Error::invalid("at least one experiment is required"));
    }
    if t_a_ns == 0 {
        return Err(Error::invalid("t_a must be positive"));
    }
    let n = curves.len();
    let mut grid = Vec::with_capacity(runs.len());
    let mut best: Option<(f64, u64, usize)> = None;
    for &k in runs {
        let t = k * t_a_ns;
        let successes = curves.iter().filter(|c| c.value_at(t) >= target).count();
        let p = successes as f64 / n as f64;
        grid.push((t, p));
        if let Ttd::Finite(time) = ttd(p, k, t_a_ns as f64)? {
            if best.is_none_or(|(b, _, _)| time < b) {
                best = Some((time, k, successes));
            }
        }
    }
    let (ttd_ns, n_runs, successes) = match best {
        Some((t, k, s)) => (Some(t), k, s),
        None => (None, runs.last().copied().unwrap_or(0), 0),
    };
    Ok(TtdRecord {
        solver_id: solver_id.to_string(),
        instance_id: instance_id.to_string(),
        target,
        p: successes as f64 / n as f64,
        successes,
        experiments: n,
        n_runs,
        t_a_ns,
        ttd_ns,
        censored: ttd_ns.is_none(),
        grid,
    })
}
