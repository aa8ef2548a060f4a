use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::diversity::{DEFAULT_SHUFFLES, check_radius};
use crate::error::{Error, Result};
use crate::metrics::DEFAULT_TARGET_CALCULATIONS;
use crate::solvers::{PreparedSolver, SolverKind, SolverSpec};

/// Where the target diversity comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSource {
    /// One sample file per problem; `{id}` in the path is replaced by the
    /// problem id.
    Samples(String),
    Solver(SolverSpec),
}

impl Default for ReferenceSource {
    fn default() -> Self {
        ReferenceSource::Solver(SolverSpec::default_reference())
    }
}

impl ReferenceSource {
    pub fn describe(&self) -> String {
        match self {
            ReferenceSource::Samples(path) => format!("samples:{path}"),
            ReferenceSource::Solver(spec) => format!("solver:{}", spec.kind()),
        }
    }
}

fn default_alpha() -> f64 {
    0.01
}
fn default_radius() -> f64 {
    0.25
}
fn default_experiments() -> usize {
    100
}
fn default_wall_time() -> u64 {
    300_000_000_000
}
fn default_max_samples() -> usize {
    1_000_000
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}
fn default_shuffles() -> usize {
    DEFAULT_SHUFFLES
}
fn default_target_calculations() -> usize {
    DEFAULT_TARGET_CALCULATIONS
}
fn default_reference_samples() -> usize {
    50_000
}
fn default_energy_search_samples() -> usize {
    100_000
}
fn default_grid_points() -> usize {
    40
}
fn default_tuning_per_group() -> usize {
    5
}

/// Benchmark description, read from JSON. Relative paths are resolved
/// against the config file's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problems: Vec<PathBuf>,
    pub solver: SolverKind,
    /// Base solver parameters, without the `solver` tag.
    #[serde(default)]
    pub params: Value,
    /// Values to sweep, keyed by dotted parameter path such as
    /// `ladder.target_exchange_rate`.
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<Value>>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub reference: ReferenceSource,
    #[serde(default = "default_experiments")]
    pub num_experiments: usize,
    #[serde(default = "default_wall_time")]
    pub wall_time_ns: u64,
    #[serde(default = "default_max_samples")]
    pub max_samples: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_shuffles")]
    pub shuffles: usize,
    #[serde(default = "default_target_calculations")]
    pub target_calculations: usize,
    /// Samples drawn from a reference solver.
    #[serde(default = "default_reference_samples")]
    pub reference_samples: usize,
    /// Candidate budget when searching for the energy range.
    #[serde(default = "default_energy_search_samples")]
    pub energy_search_samples: usize,
    /// Block lengths tried when minimising TTD.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Problems used by grid search; defaults to the first
    /// `tuning_per_group` of each class and size.
    #[serde(default)]
    pub tuning_subset: Option<Vec<PathBuf>>,
    #[serde(default = "default_tuning_per_group")]
    pub tuning_per_group: usize,
    #[serde(default)]
    pub threads: Option<usize>,
}

/// One point of the parameter grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint {
    pub overrides: BTreeMap<String, Value>,
    pub spec: SolverSpec,
    pub params: Value,
    pub hash: String,
}

impl ExperimentConfig {
    /// Minimal config with defaults for everything else.
    pub fn new(problems: Vec<PathBuf>, solver: SolverKind) -> Self {
        serde_json::from_value(serde_json::json!({ "problems": problems, "solver": solver }))
            .expect("defaults deserialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut config: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.problems.iter_mut().for_each(fix);
        if let Some(subset) = &mut self.tuning_subset {
            subset.iter_mut().for_each(fix);
        }
        fix(&mut self.out_dir);
        if let ReferenceSource::Samples(p) = &mut self.reference {
            if Path::new(p).is_relative() {
                *p = base.join(&*p).to_string_lossy().into_owned();
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::invalid("config lists no problems"));
        }
        if let Some((key, _)) = self.grid.iter().find(|(_, v)| v.is_empty()) {
            return Err(Error::invalid(format!("grid entry {key:?} has no values")));
        }
        if self.wall_time_ns == 0 {
            return Err(Error::invalid("wall_time_ns must be positive"));
        }
        if !(0.0..=0.5).contains(&self.alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 0.5], got {}", self.alpha)));
        }
        check_radius(self.radius)?;
        for (name, value) in [
            ("num_experiments", self.num_experiments),
            ("max_samples", self.max_samples),
            ("shuffles", self.shuffles),
            ("target_calculations", self.target_calculations),
            ("grid_points", self.grid_points),
        ] {
            if value == 0 {
                return Err(Error::invalid(format!("{name} must be at least 1")));
            }
        }
        self.param_points().map(|_| ())
    }

    /// Cartesian product of the grid, keys in sorted order.
    pub fn param_points(&self) -> Result<Vec<ParamPoint>> {
        let mut combos: Vec<BTreeMap<String, Value>> = vec![BTreeMap::new()];
        for (key, values) in &self.grid {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |v| {
                        let mut c = c.clone();
                        c.insert(key.clone(), v.clone());
                        c
                    })
                })
                .collect();
        }
        combos
            .into_iter()
            .map(|overrides| {
                let mut params = match &self.params {
                    Value::Null => Value::Object(Map::new()),
                    Value::Object(_) => self.params.clone(),
                    _ => return Err(Error::invalid("params must be a JSON object")),
                };
                for (key, value) in &overrides {
                    set_path(&mut params, key, value.clone())?;
                }
                let spec = SolverSpec::from_params(self.solver, params.clone())?;
                Ok(ParamPoint {
                    hash: params_hash(&spec)?,
                    overrides,
                    spec,
                    params,
                })
            })
            .collect()
    }
}

fn set_path(target: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut node = target;
    let mut parts = path.split('.').peekable();
    while let Some(part) = parts.next() {
        let map = node
            .as_object_mut()
            .ok_or_else(|| Error::invalid(format!("grid path {path:?} crosses a non-object")))?;
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    Err(Error::invalid("empty grid path"))
}

/// First 16 hex digits of the SHA-256 of the solver settings in JSON form.
pub fn params_hash(spec: &SolverSpec) -> Result<String> {
    let canonical = serde_json::to_string(spec)?;
    Ok(hex::encode(&Sha256::digest(canonical.as_bytes())[..8]))
}

/// Tie-break key for grid search: fewer replicas, then fewer copies.
pub(crate) fn size_key(solver: &PreparedSolver) -> (usize, usize) {
    (solver.replica_count(), solver.copy_count())
}
