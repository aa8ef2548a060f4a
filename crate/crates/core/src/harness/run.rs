use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{size_key, ExperimentConfig, ParamPoint, ReferenceSource};
use super::{import_reference, with_pool, worker_count};
use crate::error::{Error, Result};
use crate::ising::io::read_problem;
use crate::ising::{IsingProblem, SampleSet};
use crate::metrics::{
    diversity_over_time, min_max_energy_search, run_grid, target_diversity, ttd_record, ApproximationSpec,
    DiversityCurve, EnergyBounds, TargetDiversity, TtdRecord,
};
use crate::rng::{derive_path, derive_seed};
use crate::solvers::{PreparedSolver, SaParams, SolverKind, SolverSpec};
use crate::topology::two_coloring;
use crate::{FORMAT_VERSION, TOOLKIT_VERSION};

const REFERENCE_STREAM: u64 = 1;
const EXPERIMENT_STREAM: u64 = 2;

/// Samples of one experiment, restarted with fresh seeds until the
/// clock budget or the sample cap is exhausted.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRun {
    pub samples: SampleSet,
    pub elapsed_ns: u64,
    /// The clock budget, not the sample cap, ended the experiment.
    pub hit_wall_time: bool,
}

pub fn run_experiment(
    problem: &IsingProblem,
    solver: &PreparedSolver,
    seed: u64,
    wall_time_ns: u64,
    max_samples: usize,
) -> Result<ExperimentRun> {
    let mut samples = SampleSet::for_problem(problem);
    let mut elapsed = 0u64;
    for round in 0u64.. {
        let remaining = wall_time_ns - elapsed;
        let run = solver.run(problem, derive_seed(seed, round), Some(remaining))?;
        let used = run.final_time();
        if run.is_empty() || used == 0 {
            break;
        }
        samples.extend_shifted(run, elapsed)?;
        elapsed += used;
        if samples.len() >= max_samples {
            samples.truncate(max_samples);
            return Ok(ExperimentRun { samples, elapsed_ns: elapsed, hit_wall_time: false });
        }
    }
    Ok(ExperimentRun { samples, elapsed_ns: elapsed, hit_wall_time: true })
}

/// Everything derived once per problem.
struct Instance {
    path: PathBuf,
    problem: IsingProblem,
    class: String,
    size: usize,
    spec: ApproximationSpec,
    bounds: EnergyBounds,
    target: TargetDiversity,
}

fn default_search_solver() -> SolverSpec {
    SolverSpec::Sa(SaParams::geometric(0.1, 5.0, 1000, 100))
}

/// Energy range for scoring: `e_min` is the best of the reference samples
/// and an annealing search of `search_samples` candidates; `e_max` is
/// `−e_min` for zero-field bipartite problems and searched otherwise. The
/// search is skipped when the symmetric case applies and the reference is
/// non-empty.
pub fn reference_bounds(problem: &IsingProblem, reference: &SampleSet, search_samples: usize, seed: u64) -> Result<EnergyBounds> {
    let bipartite = problem.has_zero_field() && two_coloring(&problem.coupling_graph()).is_ok();
    if let (Some(e_min), true) = (reference.min_energy(), bipartite) {
        return Ok(EnergyBounds {
            e_min,
            e_max: -e_min,
            candidates: reference.len(),
            symmetric: true,
        });
    }
    let search = default_search_solver().prepare(problem, 0)?;
    let found = min_max_energy_search(problem, search_samples, &[search], seed)?;
    let e_min = reference.min_energy().map_or(found.e_min, |e| e.min(found.e_min));
    Ok(EnergyBounds {
        e_min,
        e_max: if found.symmetric { -e_min } else { found.e_max },
        candidates: found.candidates + reference.len(),
        symmetric: found.symmetric,
    })
}

fn load_instance(config: &ExperimentConfig, index: usize, path: &Path) -> Result<Instance> {
    let problem = read_problem(path)?;
    let seed = derive_path(config.master_seed, &[REFERENCE_STREAM, index as u64]);
    let reference = match &config.reference {
        ReferenceSource::Samples(pattern) => import_reference(&problem, pattern.replace("{id}", problem.id()), false)?.0,
        ReferenceSource::Solver(spec) => {
            let prepared = spec.prepare(&problem, derive_seed(seed, 0))?;
            run_experiment(&problem, &prepared, derive_seed(seed, 1), config.wall_time_ns, config.reference_samples)?
                .samples
        }
    };
    let bounds = reference_bounds(&problem, &reference, config.energy_search_samples, derive_seed(seed, 2))?;
    let spec = ApproximationSpec::new(config.alpha, bounds.e_min, bounds.e_max, config.radius)?;
    let target = target_diversity(
        &reference,
        &spec,
        config.target_calculations,
        config.shuffles,
        derive_seed(seed, 3),
        config.reference.describe(),
    )?;
    info!("{}: target diversity {} from {} fit samples", problem.id(), target.value, target.num_fit);
    let meta = problem.metadata();
    Ok(Instance {
        path: path.to_path_buf(),
        class: meta.get("class").and_then(Value::as_str).unwrap_or("").to_string(),
        size: meta.get("L").and_then(Value::as_u64).unwrap_or(0) as usize,
        problem,
        spec,
        bounds,
        target,
    })
}

/// One benchmark result: a solver setting on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub instance: String,
    pub problem_path: String,
    pub class: String,
    #[serde(rename = "L")]
    pub size: usize,
    pub solver: SolverKind,
    pub params: Value,
    pub params_hash: String,
    pub reference: String,
    pub target: TargetDiversity,
    pub energy: EnergyBounds,
    pub ttd: TtdRecord,
    pub toolkit_version: String,
    pub format_version: String,
}

/// Row of `results.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub class: String,
    #[serde(rename = "L")]
    pub size: usize,
    pub solver: String,
    pub params_hash: String,
    pub target_diversity: usize,
    pub p: f64,
    pub n_runs: u64,
    pub t_a_ns: u64,
    /// `inf` when the target was never reached.
    pub ttd_ns: f64,
    pub censored: bool,
}

impl From<&ResultRecord> for ResultRow {
    fn from(r: &ResultRecord) -> Self {
        Self {
            instance: r.instance.clone(),
            class: r.class.clone(),
            size: r.size,
            solver: r.solver.to_string(),
            params_hash: r.params_hash.clone(),
            target_diversity: r.target.value,
            p: r.ttd.p,
            n_runs: r.ttd.n_runs,
            t_a_ns: r.ttd.t_a_ns,
            ttd_ns: r.ttd.ttd_ns.unwrap_or(f64::INFINITY),
            censored: r.ttd.censored,
        }
    }
}

/// Persisted diversity curves of every experiment of one record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub instance: String,
    pub solver: SolverKind,
    pub params_hash: String,
    pub target: usize,
    pub t_a_ns: u64,
    pub runs: Vec<u64>,
    pub curves: Vec<DiversityCurve>,
}

impl CurveFile {
    pub fn file_name(&self) -> String {
        format!("{}__{}-{}.json", self.instance, self.solver, self.params_hash)
    }
}

struct Evaluation {
    record: ResultRecord,
    curves: CurveFile,
    size_key: (usize, usize),
}

fn evaluate(
    config: &ExperimentConfig,
    instance: &Instance,
    instance_index: usize,
    point_index: usize,
    point: &ParamPoint,
) -> Result<Evaluation> {
    let problem = &instance.problem;
    let seed = derive_path(config.master_seed, &[EXPERIMENT_STREAM, instance_index as u64, point_index as u64]);
    let prepared = point.spec.prepare(problem, derive_seed(seed, u64::MAX))?;
    let t_a = prepared.emission_interval_ns(problem.num_spins()).max(1);
    let runs = run_grid(config.wall_time_ns / t_a, config.grid_points);
    let times: Vec<u64> = runs.iter().map(|k| k * t_a).collect();

    let curves = (0..config.num_experiments as u64)
        .into_par_iter()
        .map(|e| {
            let es = derive_seed(seed, e);
            let run = run_experiment(problem, &prepared, es, config.wall_time_ns, config.max_samples)?;
            diversity_over_time(&run.samples, &instance.spec, &times, config.shuffles, derive_seed(es, u64::MAX))
        })
        .collect::<Result<Vec<_>>>()?;

    let solver_id = format!("{}-{}", prepared.kind(), point.hash);
    let ttd = ttd_record(&solver_id, problem.id(), &curves, instance.target.value, t_a, &runs)?;
    if ttd.censored {
        warn!("{} with {}: target {} never reached", problem.id(), solver_id, instance.target.value);
    }
    let record = ResultRecord {
        instance: problem.id().to_string(),
        problem_path: instance.path.to_string_lossy().into_owned(),
        class: instance.class.clone(),
        size: instance.size,
        solver: prepared.kind(),
        params: point.params.clone(),
        params_hash: point.hash.clone(),
        reference: config.reference.describe(),
        target: instance.target.clone(),
        energy: instance.bounds,
        ttd,
        toolkit_version: TOOLKIT_VERSION.to_string(),
        format_version: FORMAT_VERSION.to_string(),
    };
    let curves = CurveFile {
        instance: record.instance.clone(),
        solver: record.solver,
        params_hash: record.params_hash.clone(),
        target: record.target.value,
        t_a_ns: t_a,
        runs,
        curves,
    };
    Ok(Evaluation {
        record,
        curves,
        size_key: size_key(&prepared),
    })
}

fn evaluate_all(config: &ExperimentConfig, problems: &[PathBuf]) -> Result<Vec<Vec<Evaluation>>> {
    let points = config.param_points()?;
    let instances = problems
        .par_iter()
        .enumerate()
        .map(|(i, path)| load_instance(config, i, path))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, usize)> = (0..instances.len()).flat_map(|i| (0..points.len()).map(move |p| (i, p))).collect();
    let mut results = tasks
        .par_iter()
        .map(|&(i, p)| evaluate(config, &instances[i], i, p, &points[p]))
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    // Group by grid point, instances in config order.
    let mut by_point: Vec<Vec<Evaluation>> = (0..points.len()).map(|_| Vec::new()).collect();
    for _ in 0..instances.len() {
        for group in by_point.iter_mut() {
            group.push(results.next().expect("one result per task"));
        }
    }
    Ok(by_point)
}

fn unix_seconds() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkOutcome {
    pub records: Vec<ResultRecord>,
    pub out_dir: PathBuf,
}

impl BenchmarkOutcome {
    pub fn all_censored(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.ttd.censored)
    }
}

/// Runs every problem against every grid point and writes `records.json`,
/// `results.csv`, `curves/` and `run_meta.json` to the output directory.
pub fn run_benchmark(config: &ExperimentConfig) -> Result<BenchmarkOutcome> {
    config.validate()?;
    let threads = worker_count(config.threads);
    let started = unix_seconds();
    let evaluations = with_pool(threads, || evaluate_all(config, &config.problems))??;

    let out = &config.out_dir;
    std::fs::create_dir_all(out.join("curves"))?;
    let mut records = Vec::new();
    let mut csv = csv::Writer::from_path(out.join("results.csv"))?;
    for evaluation in evaluations.into_iter().flatten() {
        write_json(&out.join("curves").join(evaluation.curves.file_name()), &evaluation.curves)?;
        csv.serialize(ResultRow::from(&evaluation.record))?;
        records.push(evaluation.record);
    }
    csv.flush()?;
    write_json(&out.join("records.json"), &records)?;
    write_json(
        &out.join("run_meta.json"),
        &serde_json::json!({
            "started_unix_s": started,
            "finished_unix_s": unix_seconds(),
            "threads": threads,
            "toolkit_version": TOOLKIT_VERSION,
            "config": config,
        }),
    )?;
    Ok(BenchmarkOutcome {
        records,
        out_dir: out.clone(),
    })
}

/// One grid point summarised over the tuning problems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub overrides: BTreeMap<String, Value>,
    pub params_hash: String,
    /// `None` when the median instance never reached its target.
    pub median_ttd_ns: Option<f64>,
    pub replicas: usize,
    pub copies: usize,
    pub censored_instances: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSearchOutcome {
    pub rows: Vec<GridRow>,
    /// Index into `rows` of the lowest median TTD.
    pub best: Option<usize>,
    pub tuning_problems: Vec<PathBuf>,
}

fn tuning_problems(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    if let Some(subset) = &config.tuning_subset {
        return Ok(subset.clone());
    }
    let mut taken: BTreeMap<(String, u64), usize> = BTreeMap::new();
    let mut chosen = Vec::new();
    for path in &config.problems {
        let problem = read_problem(path)?;
        let meta = problem.metadata();
        let key = (
            meta.get("class").and_then(Value::as_str).unwrap_or("").to_string(),
            meta.get("L").and_then(Value::as_u64).unwrap_or(0),
        );
        let count = taken.entry(key).or_insert(0);
        if *count < config.tuning_per_group {
            *count += 1;
            chosen.push(path.clone());
        }
    }
    Ok(chosen)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Evaluates every grid point on the tuning problems and picks the lowest
/// median TTD. Points whose median is unbounded are never chosen; ties go
/// to fewer replicas, then fewer copies. Writes `grid_search.csv`,
/// `grid_search.json` and `grid_records.json`.
pub fn run_grid_search(config: &ExperimentConfig) -> Result<GridSearchOutcome> {
    config.validate()?;
    let problems = tuning_problems(config)?;
    if problems.is_empty() {
        return Err(Error::invalid("tuning subset is empty"));
    }
    let threads = worker_count(config.threads);
    let evaluations = with_pool(threads, || evaluate_all(config, &problems))??;
    let points = config.param_points()?;

    let mut rows = Vec::new();
    for (point, group) in points.iter().zip(&evaluations) {
        let mut ttds: Vec<f64> = group.iter().map(|e| e.record.ttd.ttd_ns.unwrap_or(f64::INFINITY)).collect();
        let m = median(&mut ttds);
        let (replicas, copies) = group.iter().map(|e| e.size_key).max().unwrap_or((0, 0));
        rows.push(GridRow {
            overrides: point.overrides.clone(),
            params_hash: point.hash.clone(),
            median_ttd_ns: m.is_finite().then_some(m),
            replicas,
            copies,
            censored_instances: group.iter().filter(|e| e.record.ttd.censored).count(),
        });
    }
    let best = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.median_ttd_ns.map(|m| (i, m, r.replicas, r.copies)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)).then(a.0.cmp(&b.0)))
        .map(|(i, ..)| i);

    let out = &config.out_dir;
    std::fs::create_dir_all(out)?;
    let mut csv = csv::Writer::from_path(out.join("grid_search.csv"))?;
    let keys: Vec<&String> = config.grid.keys().collect();
    let mut header: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
    header.extend(["params_hash", "median_ttd_ns", "replicas", "copies", "censored_instances"].map(String::from));
    csv.write_record(&header)?;
    for row in &rows {
        let mut fields: Vec<String> = keys.iter().map(|k| row.overrides[*k].to_string()).collect();
        fields.push(row.params_hash.clone());
        fields.push(row.median_ttd_ns.unwrap_or(f64::INFINITY).to_string());
        fields.push(row.replicas.to_string());
        fields.push(row.copies.to_string());
        fields.push(row.censored_instances.to_string());
        csv.write_record(&fields)?;
    }
    csv.flush()?;
    let outcome = GridSearchOutcome {
        rows,
        best,
        tuning_problems: problems,
    };
    write_json(&out.join("grid_search.json"), &outcome)?;
    let records: Vec<&ResultRecord> = evaluations.iter().flatten().map(|e| &e.record).collect();
    write_json(&out.join("grid_records.json"), &records)?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::io::write_problem;
    use crate::solvers::{LadderSpec, PtParams};
    use crate::topology::{gen_ran1, ChimeraGraph};

    fn small_config(dir: &Path) -> ExperimentConfig {
        let p = gen_ran1(ChimeraGraph::new(1).unwrap().graph(), 3)
            .with_metadata("id", "tiny")
            .with_metadata("L", 1);
        let path = dir.join("tiny.json");
        write_problem(&path, &p).unwrap();
        let mut c = ExperimentConfig::new(vec![path], SolverKind::Sa);
        c.params = serde_json::json!({"schedule": [0.5, 1.0, 2.0, 4.0], "num_reads": 5});
        c.reference = ReferenceSource::Solver(SolverSpec::Sa(SaParams::geometric(0.1, 5.0, 50, 200)));
        c.num_experiments = 4;
        c.wall_time_ns = 32 * 400;
        c.shuffles = 5;
        c.target_calculations = 3;
        c.out_dir = dir.join("out");
        c
    }

    #[test]
    fn experiments_restart_until_budget() {
        let p = gen_ran1(ChimeraGraph::new(1).unwrap().graph(), 0);
        let sa = SolverSpec::Sa(SaParams::geometric(0.1, 2.0, 4, 3)).prepare(&p, 0).unwrap();
        let run = run_experiment(&p, &sa, 1, 32 * 10, 1000).unwrap();
        assert_eq!(run.samples.len(), 10);
        assert_eq!(run.elapsed_ns, 320);
        assert!(run.hit_wall_time);
        let times: Vec<u64> = run.samples.iter().map(|s| s.time_ns).collect();
        assert_eq!(times, (1..=10).map(|k| 32 * k).collect::<Vec<_>>());
        let capped = run_experiment(&p, &sa, 1, 32 * 10, 4).unwrap();
        assert_eq!((capped.samples.len(), capped.hit_wall_time), (4, false));
        assert!(run_experiment(&p, &sa, 1, 5, 10).unwrap().samples.is_empty());
    }

    #[test]
    fn benchmark_writes_consistent_records() {
        let dir = tempfile::tempdir().unwrap();
        let c = small_config(dir.path());
        let outcome = run_benchmark(&c).unwrap();
        assert_eq!(outcome.records.len(), 1);
        let r = &outcome.records[0];
        assert!(r.target.value >= 1);
        let text = std::fs::read_to_string(c.out_dir.join("records.json")).unwrap();
        let back: Vec<ResultRecord> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, outcome.records);

        let curve_file: CurveFile = serde_json::from_str(
            &std::fs::read_to_string(c.out_dir.join("curves").join(format!("tiny__sa-{}.json", r.params_hash))).unwrap(),
        )
        .unwrap();
        let again = ttd_record(&r.ttd.solver_id, "tiny", &curve_file.curves, curve_file.target, curve_file.t_a_ns, &curve_file.runs)
            .unwrap();
        assert_eq!(again, r.ttd);

        let mut reader = csv::Reader::from_path(c.out_dir.join("results.csv")).unwrap();
        assert_eq!(
            reader.headers().unwrap().iter().collect::<Vec<_>>().join(","),
            super::super::CSV_HEADER
        );
        let rows: Vec<ResultRow> = reader.deserialize().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(rows, vec![ResultRow::from(r)]);
    }

    #[test]
    fn trivial_target_and_starved_budget() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        c.num_experiments = 1;
        c.radius = 1.0;
        let r = run_benchmark(&c).unwrap().records.remove(0);
        assert_eq!(r.target.value, 1);
        assert_eq!((r.ttd.p, r.ttd.n_runs), (1.0, 1));
        assert_eq!(r.ttd.ttd_ns, Some(r.ttd.t_a_ns as f64));

        c.wall_time_ns = 1;
        let outcome = run_benchmark(&c).unwrap();
        assert!(outcome.all_censored());
        assert_eq!(outcome.records[0].ttd.ttd_ns, None);
    }

    #[test]
    fn grid_search_picks_a_point() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small_config(dir.path());
        c.solver = SolverKind::Pt;
        c.params = serde_json::to_value(PtParams {
            ladder: LadderSpec::Geometric { beta_min: 0.2, beta_max: 3.0, rungs: 3 },
            sweeps_between_samples: 1,
            max_sweeps: 200,
            ..PtParams::default()
        })
        .unwrap();
        let single = run_grid_search(&c).unwrap();
        assert_eq!((single.rows.len(), single.best), (1, Some(0)));

        c.grid.insert("num_copies".into(), vec![1.into(), 2.into()]);
        let g = run_grid_search(&c).unwrap();
        assert_eq!(g.rows.len(), 2);
        assert_eq!((g.rows[0].copies, g.rows[1].copies), (1, 2));
        assert!(g.best.is_some());
        assert!(c.out_dir.join("grid_search.csv").exists());
    }

    #[test]
    fn median_handles_unbounded() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [1.0, f64::INFINITY]), f64::INFINITY);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
