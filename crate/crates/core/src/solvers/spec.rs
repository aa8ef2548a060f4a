use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::anneal::{simulated_annealing, SaParams};
use super::tempering::{run_pt, IcmRungs, PtConfig, TemperatureLadder};
use super::tuning::tune_temperatures;
use crate::error::{Error, Result};
use crate::ising::{IsingProblem, SampleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Sa,
    Pt,
    PtIcm,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Sa => "sa",
            SolverKind::Pt => "pt",
            SolverKind::PtIcm => "pt-icm",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sa" => Ok(SolverKind::Sa),
            "pt" => Ok(SolverKind::Pt),
            "pt-icm" | "pt+icm" => Ok(SolverKind::PtIcm),
            other => Err(Error::invalid(format!("unknown solver {other:?}"))),
        }
    }
}

/// How a PT ladder is obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LadderSpec {
    Explicit { betas: TemperatureLadder },
    Tuned { target_exchange_rate: f64 },
    Geometric { beta_min: f64, beta_max: f64, rungs: usize },
}

impl Default for LadderSpec {
    fn default() -> Self {
        LadderSpec::Tuned { target_exchange_rate: 0.45 }
    }
}

fn default_copies() -> usize {
    1
}
fn default_sweeps_between_samples() -> usize {
    10
}
fn default_icm_moves() -> usize {
    1
}
fn default_max_sweeps() -> usize {
    10_000
}

/// Problem-independent PT parameters; the ladder is resolved per problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtParams {
    #[serde(default)]
    pub ladder: LadderSpec,
    #[serde(default = "default_copies")]
    pub num_copies: usize,
    #[serde(default = "default_sweeps_between_samples")]
    pub sweeps_between_samples: usize,
    #[serde(default)]
    pub icm_rungs: IcmRungs,
    #[serde(default = "default_icm_moves")]
    pub icm_moves_per_iteration: usize,
    #[serde(default = "default_max_sweeps")]
    pub max_sweeps: usize,
}

impl Default for PtParams {
    fn default() -> Self {
        Self {
            ladder: LadderSpec::default(),
            num_copies: default_copies(),
            sweeps_between_samples: default_sweeps_between_samples(),
            icm_rungs: IcmRungs::All,
            icm_moves_per_iteration: default_icm_moves(),
            max_sweeps: default_max_sweeps(),
        }
    }
}

/// A solver and its hyper-parameters, as written in parameter files:
/// `{"solver": "pt-icm", "num_copies": 10, "ladder": {"target_exchange_rate": 0.45}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "kebab-case")]
pub enum SolverSpec {
    Sa(SaParams),
    Pt(PtParams),
    PtIcm(PtParams),
}

impl SolverSpec {
    /// Builds a spec from a kind and a parameter object without the tag.
    pub fn from_params(kind: SolverKind, params: Value) -> Result<Self> {
        let mut params = match params {
            Value::Object(map) => map,
            Value::Null => Default::default(),
            _ => return Err(Error::invalid("solver parameters must be a JSON object")),
        };
        params.insert("solver".into(), Value::String(kind.as_str().into()));
        Ok(serde_json::from_value(Value::Object(params))?)
    }

    pub fn kind(&self) -> SolverKind {
        match self {
            SolverSpec::Sa(_) => SolverKind::Sa,
            SolverSpec::Pt(_) => SolverKind::Pt,
            SolverSpec::PtIcm(_) => SolverKind::PtIcm,
        }
    }

    /// PT+ICM with ten copies, the default reference solver.
    pub fn default_reference() -> Self {
        SolverSpec::PtIcm(PtParams {
            num_copies: 10,
            max_sweeps: 2_000,
            ..PtParams::default()
        })
    }

    /// Resolves problem-dependent settings (ladder tuning).
    pub fn prepare(&self, problem: &IsingProblem, seed: u64) -> Result<PreparedSolver> {
        match self {
            SolverSpec::Sa(p) => {
                if p.schedule.is_empty() {
                    return Err(Error::invalid("annealing schedule is empty"));
                }
                Ok(PreparedSolver::Sa(p.clone()))
            }
            SolverSpec::Pt(p) | SolverSpec::PtIcm(p) => {
                let ladder = match &p.ladder {
                    LadderSpec::Explicit { betas } => betas.clone(),
                    LadderSpec::Geometric { beta_min, beta_max, rungs } => {
                        TemperatureLadder::geometric(*beta_min, *beta_max, *rungs)?
                    }
                    LadderSpec::Tuned { target_exchange_rate } => {
                        tune_temperatures(problem, *target_exchange_rate, seed)?.ladder
                    }
                };
                let config = PtConfig {
                    ladder,
                    num_copies: p.num_copies,
                    sweeps_between_samples: p.sweeps_between_samples,
                    icm_enabled: matches!(self, SolverSpec::PtIcm(_)),
                    icm_rungs: p.icm_rungs,
                    icm_moves_per_iteration: p.icm_moves_per_iteration,
                    max_sweeps: p.max_sweeps,
                    seed: 0,
                    max_total_updates: None,
                    target_energy: None,
                };
                config.validate()?;
                Ok(PreparedSolver::Pt(config))
            }
        }
    }
}

/// A solver ready to run on one problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PreparedSolver {
    Sa(SaParams),
    Pt(PtConfig),
}

impl PreparedSolver {
    pub fn kind(&self) -> SolverKind {
        match self {
            PreparedSolver::Sa(_) => SolverKind::Sa,
            PreparedSolver::Pt(c) if c.icm_enabled => SolverKind::PtIcm,
            PreparedSolver::Pt(_) => SolverKind::Pt,
        }
    }

    /// Runs with `seed`, stopping before the clock passes `budget_ns`.
    pub fn run(&self, problem: &IsingProblem, seed: u64, budget_ns: Option<u64>) -> Result<SampleSet> {
        match self {
            PreparedSolver::Sa(p) => {
                let per_read = (p.schedule.len() * problem.num_spins()) as u64;
                let reads = match budget_ns {
                    Some(b) => p.num_reads.min((b / per_read.max(1)) as usize),
                    None => p.num_reads,
                };
                simulated_annealing(problem, &p.schedule, reads, seed)
            }
            PreparedSolver::Pt(c) => {
                let mut config = c.clone();
                config.seed = seed;
                config.max_total_updates = budget_ns;
                run_pt(problem, &config)
            }
        }
    }

    /// Clock time between consecutive sample emissions: one read for SA,
    /// one collection interval of a PT copy.
    pub fn emission_interval_ns(&self, num_spins: usize) -> u64 {
        match self {
            PreparedSolver::Sa(p) => (p.schedule.len() * num_spins) as u64,
            PreparedSolver::Pt(c) => (c.sweeps_between_samples * c.replicas_per_copy() * num_spins) as u64,
        }
    }

    /// Replicas per copy (1 for SA).
    pub fn replica_count(&self) -> usize {
        match self {
            PreparedSolver::Sa(_) => 1,
            PreparedSolver::Pt(c) => c.replicas_per_copy(),
        }
    }

    /// The same solver with cluster moves switched off, for problems with
    /// a field.
    pub fn without_cluster_moves(&self) -> Self {
        match self {
            PreparedSolver::Pt(c) => {
                let mut c = c.clone();
                c.icm_enabled = false;
                PreparedSolver::Pt(c)
            }
            other => other.clone(),
        }
    }

    pub fn copy_count(&self) -> usize {
        match self {
            PreparedSolver::Sa(p) => p.num_reads,
            PreparedSolver::Pt(c) => c.num_copies,
        }
    }
}
