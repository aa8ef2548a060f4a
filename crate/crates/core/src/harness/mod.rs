//! Experiment orchestration: instance batches, reference import, benchmark
//! and grid-search runs, and report tables.
//!
//! Every random choice is derived from the master seed along a fixed path
//! (instance index, grid point, experiment), so records do not depend on
//! how many worker threads execute them. Wall-clock timestamps only appear
//! in `run_meta.json`.

mod config;
mod report;
mod run;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ising::io::{read_samples, write_problem};
use crate::ising::{IsingProblem, SampleSet};
use crate::topology::{generate, ChimeraGraph, DclParams, InstanceClass};

pub use config::{params_hash, ExperimentConfig, ParamPoint, ReferenceSource};
pub use report::{percentile, write_report, ReportSummary, CSV_HEADER};
pub use run::{
    reference_bounds, run_benchmark, run_experiment, run_grid_search, BenchmarkOutcome, CurveFile, ExperimentRun, GridRow,
    GridSearchOutcome, ResultRecord, ResultRow,
};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "DIVBENCH_THREADS";

/// Worker count: the request (or all cores), capped by `DIVBENCH_THREADS`.
pub fn worker_count(requested: Option<usize>) -> usize {
    let mut n = requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Some(cap) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if cap > 0 {
            n = n.min(cap);
        }
    }
    n.max(1)
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Writes `count` instances of every class and size to `out_dir` as
/// `<class>_L<size>_s<seed>.json`, with seeds `seed, seed+1, …`.
pub fn generate_instances(
    classes: &[InstanceClass],
    sizes: &[usize],
    count: usize,
    seed: u64,
    dcl: &DclParams,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for &size in sizes {
        let chimera = ChimeraGraph::new(size)?;
        for &class in classes {
            for k in 0..count as u64 {
                let problem = generate(class, &chimera, seed + k, dcl)?;
                let path = out_dir.join(format!("{}.json", problem.id()));
                write_problem(&path, &problem)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

/// Reads a reference sample file for `problem` and re-evaluates every
/// energy. A stored energy that disagrees is an error listing its line
/// numbers when `strict`, and is replaced otherwise.
pub fn import_reference(problem: &IsingProblem, path: impl AsRef<Path>, strict: bool) -> Result<(SampleSet, Vec<usize>)> {
    let mut set = read_samples(path, Some(problem.num_spins()))?;
    let mut mismatched = Vec::new();
    for (k, sample) in set.samples.iter_mut().enumerate() {
        let actual = problem.energy(&sample.config)?;
        if (actual - sample.energy).abs() > 1e-9 * actual.abs().max(1.0) {
            // Line 1 holds the header.
            mismatched.push(k + 2);
            sample.energy = actual;
        }
    }
    if strict && !mismatched.is_empty() {
        return Err(Error::EnergyMismatch(mismatched));
    }
    Ok((set, mismatched))
}
